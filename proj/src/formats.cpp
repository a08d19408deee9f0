#include "qbound/formats.hpp"

#include <charconv>
#include <sstream>

namespace qbound {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw FormatError("bad number '" + s + "' in polynomial text");
  return v;
}

Letter parse_letter(const std::string& tok) {
  auto parts = split(tok, '.');
  if (parts.size() != 3 || parts[0].size() != 1 || (parts[0][0] != 'A' && parts[0][0] != 'B'))
    throw FormatError("bad letter '" + tok + "' (expected A.q.p or B.q.p)");
  Letter l;
  l.party = parts[0][0] == 'A' ? Party::Alice : Party::Bob;
  try {
    l.question = std::stoi(parts[1]);
    l.payload = std::stoi(parts[2]);
  } catch (const std::exception&) {
    throw FormatError("bad letter indices in '" + tok + "'");
  }
  return l;
}

}  // namespace

std::string poly_to_text(const Polynomial& p) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : p.terms()) {
    if (!first) os << "; ";
    first = false;
    os << format_double(c.real()) << ' ' << format_double(c.imag()) << " : ";
    if (m.is_identity()) {
      os << '1';
    } else {
      bool fl = true;
      for (const Letter& l : m.word()) {
        if (!fl) os << ' ';
        fl = false;
        os << (l.party == Party::Alice ? 'A' : 'B') << '.' << l.question << '.' << l.payload;
      }
    }
  }
  return os.str();
}

Polynomial poly_from_text(const std::string& text, const AlgebraSignature& sig) {
  Polynomial p(sig);
  std::string body = trim(text);
  if (body.empty()) throw FormatError("empty polynomial text");
  if (body == "0") return p;
  for (const std::string& raw : split(body, ';')) {
    std::string term = trim(raw);
    auto colon = term.find(':');
    if (colon == std::string::npos) throw FormatError("missing ':' in term '" + term + "'");
    std::istringstream coeffs(term.substr(0, colon));
    std::string re, im, extra;
    coeffs >> re >> im;
    if (coeffs >> extra) throw FormatError("too many coefficient fields in '" + term + "'");
    if (re.empty() || im.empty()) throw FormatError("expected two coefficients in '" + term + "'");
    Complex c(parse_double(re), parse_double(im));
    std::string word = trim(term.substr(colon + 1));
    std::vector<Letter> letters;
    if (word != "1") {
      std::istringstream ws(word);
      std::string tok;
      while (ws >> tok) letters.push_back(parse_letter(tok));
      if (letters.empty()) throw FormatError("empty word in term '" + term + "'");
    }
    std::optional<Monomial> m;
    try {
      m = canonicalize(letters, sig);
    } catch (const AlgebraError& e) {
      throw FormatError(std::string("invalid letter for signature: ") + e.what());
    }
    if (m) p.add_term(*m, c);
  }
  return p;
}

}  // namespace qbound
