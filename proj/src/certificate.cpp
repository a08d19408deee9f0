#include "qbound/certificate.hpp"

#include <Eigen/Eigenvalues>
#include <fstream>
#include <json.hpp>
#include <set>

#include "qbound/formats.hpp"

namespace qbound {

using nlohmann::json;

SosCertificate extract(const SdpSolution& sol, const SdpProblem& p, const ExtractOptions& opts) {
  if (sol.status != SolveStatus::Optimal)
    throw CertificateError("extraction needs an Optimal solution (got " +
                           std::string(to_string(sol.status)) + ")");
  const double nu = sol.dual_y[p.normalization_index];

  SosCertificate cert;
  cert.bound = nu;
  cert.signature = p.sig;
  cert.provenance = p.description;

  // square terms from the spectral decomposition of each slack block
  for (size_t b = 0; b < sol.dual_slack.size(); ++b) {
    const Eigen::MatrixXcd& Zb = sol.dual_slack[b];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Zb);
    if (es.info() != Eigen::Success) throw CertificateError("eigendecomposition failed");
    Polynomial prefix = block_prefix_polynomial(p, static_cast<int>(b));
    for (int t = 0; t < es.eigenvalues().size(); ++t) {
      double lambda = es.eigenvalues()(t);
      if (lambda < -opts.clamp_tol)
        throw CertificateError("dual slack block " + std::to_string(b) +
                               " has eigenvalue " + format_double(lambda) +
                               " below -clamp_tol; not PSD to tolerance");
      if (lambda <= 0.0) continue;  // clamped
      Polynomial r(p.sig);
      for (int s = 0; s < Zb.rows(); ++s) {
        Complex c = std::conj(es.eigenvectors()(s, t));
        if (std::abs(c) == 0.0) continue;
        r = r + Polynomial::monomial(p.sig, p.basis.entries[s], c);
      }
      r = prefix * r;
      if (r.is_zero()) continue;
      cert.terms.push_back({lambda, std::move(r)});
    }
  }

  // relation part:  nu I - P  =  sum lambda r^dag r
  //                            + nu (I - E(A_norm)) - sum_{k != norm} y_k E(A_k)
  //                            + (E(C) - P)
  // where E maps entry (block, i, j) to prefix_block * b_i^dag b_j.
  const Polynomial I = Polynomial::identity(p.sig);
  Polynomial norm_poly = constraint_polynomial(p, p.constraints[p.normalization_index]);
  Polynomial id_defect = I - norm_poly;
  if (!id_defect.is_zero() && nu != 0.0)
    cert.constraint_part.push_back({nu, std::move(id_defect)});
  for (size_t k = 0; k < p.constraints.size(); ++k) {
    if (static_cast<int>(k) == p.normalization_index) continue;
    const double yk = sol.dual_y[k];
    if (yk == 0.0) continue;
    Polynomial s = constraint_polynomial(p, p.constraints[k]);
    if (s.is_zero()) continue;
    cert.constraint_part.push_back({-yk, std::move(s)});
  }
  Polynomial obj_defect = objective_polynomial(p) - p.source_poly;
  if (!obj_defect.is_zero()) cert.constraint_part.push_back({1.0, std::move(obj_defect)});
  return cert;
}

VerifyReport verify(const SosCertificate& cert, const GamePolynomial& gp, double tol) {
  if (!(cert.signature == gp.signature))
    throw CertificateError(
        "certificate and game polynomial have different signatures "
        "(convert generator kinds first)");
  Polynomial residual = Polynomial::identity(cert.signature) * Complex(cert.bound);
  residual = residual - gp.poly;
  for (const auto& t : cert.terms) {
    if (t.lambda < 0.0) throw CertificateError("negative weight in certificate");
    residual = residual - adjoint(t.r) * t.r * Complex(t.lambda);
  }
  for (const auto& c : cert.constraint_part) residual = residual - c.s * Complex(c.mu);
  if (cert.signature.kind == GeneratorKind::Projector)
    residual = substitute_answer_zero(residual);

  VerifyReport rep;
  for (const auto& [m, c] : residual.terms()) {
    double a = std::abs(c);
    rep.max_residual = std::max(rep.max_residual, a);
    if (a > 0.0) rep.residuals.push_back({m, a});
  }
  rep.ok = rep.max_residual <= tol;
  return rep;
}

NicenessReport is_nice(const SosCertificate& cert) {
  NicenessReport rep;
  for (size_t i = 0; i < cert.terms.size(); ++i) {
    std::set<int> questions;
    for (const auto& [m, c] : cert.terms[i].r.terms())
      for (const Letter& l : m.word())
        if (l.party == Party::Alice) questions.insert(l.question);
    if (questions.size() > 1) {
      rep.is_nice = false;
      rep.offending_terms.push_back(
          {static_cast<int>(i), std::vector<int>(questions.begin(), questions.end())});
    }
  }
  return rep;
}

namespace {

const char* kind_name(GeneratorKind k) {
  return k == GeneratorKind::Projector ? "projector" : "observable";
}

}  // namespace

void save_cert(const SosCertificate& cert, const std::string& path) {
  json j;
  j["format_version"] = 1;
  j["kind"] = "certificate";
  j["bound"] = cert.bound;
  j["generator_kind"] = kind_name(cert.signature.kind);
  j["alice_questions"] = cert.signature.alice_questions;
  j["bob_questions"] = cert.signature.bob_questions;
  j["alice_answers"] = cert.signature.alice_answers;
  j["bob_answers"] = cert.signature.bob_answers;
  if (!cert.provenance.empty()) j["provenance"] = cert.provenance;
  json terms = json::array();
  for (const auto& t : cert.terms)
    terms.push_back({{"lambda", t.lambda}, {"poly", poly_to_text(t.r)}});
  j["terms"] = std::move(terms);
  json cp = json::array();
  for (const auto& c : cert.constraint_part)
    cp.push_back({{"mu", c.mu}, {"poly", poly_to_text(c.s)}});
  j["constraint_part"] = std::move(cp);
  std::ofstream out(path);
  if (!out) throw CertificateError("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

SosCertificate load_cert(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CertificateError("cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw CertificateError("parse error in '" + path + "': " + e.what());
  }
  if (j.value("kind", "certificate") != "certificate")
    throw CertificateError("'" + path + "': not a certificate file");
  if (j.value("format_version", 1) != 1)
    throw CertificateError("'" + path + "': unsupported format_version");

  SosCertificate cert;
  std::string kind = j.value("generator_kind", "projector");
  if (kind != "projector" && kind != "observable")
    throw CertificateError("'" + path + "': bad generator_kind '" + kind + "'");
  cert.signature =
      AlgebraSignature{j.at("alice_questions").get<int>(), j.at("bob_questions").get<int>(),
                       j.at("alice_answers").get<int>(), j.at("bob_answers").get<int>(),
                       kind == "projector" ? GeneratorKind::Projector
                                           : GeneratorKind::Observable};
  cert.signature.validate();
  if (!j.contains("bound") || !j["bound"].is_number())
    throw CertificateError("'" + path + "': missing numeric 'bound'");
  cert.bound = j["bound"].get<double>();
  cert.provenance = j.value("provenance", "");
  try {
    for (const auto& t : j.value("terms", json::array())) {
      double lambda = t.at("lambda").get<double>();
      if (lambda < 0.0)
        throw CertificateError("'" + path + "': negative lambda " + format_double(lambda));
      cert.terms.push_back(
          {lambda, poly_from_text(t.at("poly").get<std::string>(), cert.signature)});
    }
    for (const auto& c : j.value("constraint_part", json::array()))
      cert.constraint_part.push_back(
          {c.at("mu").get<double>(),
           poly_from_text(c.at("poly").get<std::string>(), cert.signature)});
  } catch (const FormatError& e) {
    throw CertificateError("'" + path + "': " + e.what());
  } catch (const json::exception& e) {
    throw CertificateError("'" + path + "': " + e.what());
  }
  return cert;
}

}  // namespace qbound
