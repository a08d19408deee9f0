#pragma once

#include <string>

#include "qbound/algebra.hpp"

namespace qbound {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Polynomial text grammar (one term per "; "-separated chunk):
//   poly   := "0" | term ("; " term)*
//   term   := float float ":" word        (coeff_re coeff_im)
//   word   := "1" | letter (" " letter)*
//   letter := ("A"|"B") "." question "." payload
// Coefficients are emitted with round-trip precision.
std::string poly_to_text(const Polynomial& p);
Polynomial poly_from_text(const std::string& text, const AlgebraSignature& sig);

std::string format_double(double v);

}  // namespace qbound
