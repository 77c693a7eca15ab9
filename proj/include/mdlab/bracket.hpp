#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mdlab/certificate.hpp"
#include "mdlab/exec.hpp"
#include "mdlab/family.hpp"
#include "mdlab/group.hpp"
#include "mdlab/multiplier.hpp"
#include "mdlab/schur.hpp"

namespace mdlab {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Certified interval for ||phi||_{M_d}, plus an optional empirical upper
// value that is never mixed into the certified side.
struct NormBracket {
  std::string phi_id;
  std::size_t d = 2;
  std::size_t radius = 0;  // lower bound from the Gram truncation on B_radius
  double lower = 0.0;
  std::string lower_provenance;
  double upper = kInfinity;
  std::string upper_provenance = "none";
  std::optional<double> empirical_upper;
  std::string empirical_provenance;
  std::vector<std::string> flags;

  bool has_flag(const std::string& f) const;
  std::string flag_string() const;  // '|'-joined
};

struct BracketOptions {
  std::size_t radius = 2;
  SchurOptions schur;
  VerifyOptions verify;
  double tol = 1e-6;          // lower <= upper + tol, else INCONSISTENT
  double cert_tol = 1e-9;     // largest accepted certificate residual
  std::size_t fourier_nodes = 0;  // 0: chosen from d, radius and the support
  Exec exec = Exec::Parallel;
};

// Lower: Schur norm of the Gram matrix on B_radius (d >= 2) or max |phi| on
// the ball (d = 1). Upper: the smallest bound among the certificates that
// apply to phi and reproduce it on d-fold products of B_radius.
NormBracket bracket(const Multiplier& phi, std::size_t d, const BracketOptions& options = {});

// Candidate certificates tried by bracket(), in order.
std::vector<FactorizationCertificate> candidate_certificates(const Multiplier& phi, std::size_t d,
                                                             const BracketOptions& options);

// Tent function prod max(0, 1 - |m_i|/(k+1)) = |F|^{-1} 1_F * reflected 1_F
// for the box F = {0..k}^n.
Multiplier folner_approximant(const GroupPtr& zn, std::size_t k);
// Regular representation with xi = eta = |F|^{-1/2} 1_F; bound 1.
FactorizationCertificate folner_certificate(const GroupPtr& zn, std::size_t k, std::size_t d,
                                            std::size_t radius);

// ---------------------------------------------------------- extension

// f = sum over x in the radius-k ball of SL(2,Z) of Phi_{k, 1-1/k}(x) delta_{sigma(x)^{-1}}.
FinitelySupportedVector lifted_quotient_approximant(const GroupPtr& semidirect, std::size_t k);

// t -> (f-check * phi~_k)(t) = sum_w f(w) phi~_k(w t), phi~_k the Folner tent on
// the kernel Z^2 extended by zero. Evaluated lazily, with f bucketed by coset.
Multiplier extension_pipeline(const FinitelySupportedVector& f, std::size_t k);
// The pointwise limit k -> infinity: t -> sum of f over the coset q(t)^{-1}.
Multiplier extension_limit(const FinitelySupportedVector& f);

// ---------------------------------------------------------- convergence

struct ConvergenceRow {
  std::size_t n = 0;
  std::size_t N = 0;
  double r = 0.0;
  double residual = 0.0;  // sup over the window of |phi_n(t) - 1|
  NormBracket bracket;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  double C = kInfinity;
  double tol = 1e-6;
  double limit_estimate = 0.0;  // Aitken extrapolation of the last three residuals
  bool monotone = false;
  bool bounded = false;
  bool success = false;
};

inline constexpr double kResidualLimitThreshold = 0.05;

double window_residual(const Multiplier& phi, const std::vector<Element>& window);
double aitken_limit(const std::vector<double>& residuals);

// SUCCESS: residuals nonincreasing, every certified upper <= C + tol, and the
// extrapolated residual limit <= kResidualLimitThreshold.
ConvergenceReport convergence_report(std::vector<ConvergenceRow> rows, double C, double tol);

struct FejerJob {
  GroupPtr group;
  std::vector<std::size_t> Ns;
  std::vector<double> rs;  // zipped with Ns; a single entry is broadcast
  std::size_t d = 2;
  BracketOptions bracket;
  std::size_t window_radius = 1;
  // Empirical Fejer upper through the tree family (free groups only).
  bool empirical = false;
  std::size_t family_radius = 6;
  double C = 1.0;
};
ConvergenceReport run_fejer(const FejerJob& job);

struct ExtensionJob {
  std::vector<std::size_t> ks;
  std::size_t window_radius = 3;
  std::size_t d = 2;
  BracketOptions bracket;
};
// Upper bounds are ||f||_1 (translates and the extension by zero of a norm-one
// Folner tent), so C is infinite and the header says so.
ConvergenceReport run_extension(const GroupPtr& semidirect, const ExtensionJob& job);

}  // namespace mdlab
