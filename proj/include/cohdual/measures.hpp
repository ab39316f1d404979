#pragma once

// Coherence quantifiers: robustness of coherence C_R in its primal witness
// form and dual Gram form, and the log-robustness C_max = log2(1 + C_R).
//
// Primal:  C_R(rho) = max tr(W rho)  s.t.  Delta(W) <= 0,  W >= -I.
// With P = W + I >= 0 and scalar slacks D_i >= 0 this becomes the standard
// form  max tr(P rho) - 1  s.t.  P_ii + D_i = 1.
// Dual:    1 + C_R(rho) = max { tr(rho S) : S >= 0, S_ii = 1 }.

#include <cmath>
#include <stdexcept>

#include "conic.hpp"
#include "linalg.hpp"
#include "quantum.hpp"

namespace cohdual {

/// C_R values below this are reported as exactly zero so that downstream
/// log2(1 + C_R) stays clean on incoherent states.
inline constexpr double kRobustnessZeroTol = 1e-7;

struct CoherenceReport {
  double c_r = 0.0;
  double c_max = 0.0;
  ComplexMatrix witness;  // W of the primal SDP
  ComplexMatrix dual_s;   // S of the dual SDP
  double gap = 0.0;       // |primal - (dual - 1)|
};

namespace detail {

inline SDPSolution solve_or_throw(const SDProblem& p, const char* what) {
  SDPSolution sol = solve(p);
  if (sol.status != SDPStatus::Optimal)
    throw std::runtime_error(std::string(what) + ": SDP solver did not converge");
  return sol;
}

}  // namespace detail

/// Primal robustness SDP. Returns (C_R value, witness W).
inline std::pair<double, ComplexMatrix> robustness_primal(const DensityMatrix& rho) {
  const int d = rho.dim();
  SDProblem p;
  const int pb = p.add_block(d);
  std::vector<int> slack(d);
  for (int i = 0; i < d; ++i) slack[i] = p.add_block(1);
  p.objective.add_matrix(pb, rho.matrix());
  for (int i = 0; i < d; ++i) {
    LinearFunctional f;
    f.add_herm(pb, i, i, 1.0);
    f.add_herm(slack[i], 0, 0, 1.0);
    p.add_equality(std::move(f), 1.0);
  }
  SDPSolution sol = detail::solve_or_throw(p, "robustness_primal");
  ComplexMatrix w = sol.blocks[0] - identity(d);
  // clean the witness so the reported W is strictly feasible: diag(W) <= 0
  for (int i = 0; i < d; ++i)
    w(i, i) = Complex(std::min(0.0, w(i, i).real()), 0.0);
  return {std::max(0.0, sol.value - 1.0), std::move(w)};
}

/// Dual robustness SDP. Returns (1 + C_R value, Gram matrix S).
inline std::pair<double, ComplexMatrix> robustness_dual(const DensityMatrix& rho) {
  const int d = rho.dim();
  SDProblem p;
  const int s = p.add_block(d);
  p.objective.add_matrix(s, rho.matrix());
  for (int i = 0; i < d; ++i) {
    LinearFunctional f;
    f.add_herm(s, i, i, 1.0);
    p.add_equality(std::move(f), 1.0);
  }
  SDPSolution sol = detail::solve_or_throw(p, "robustness_dual");
  ComplexMatrix sm = sol.blocks[0];
  for (int i = 0; i < d; ++i) sm(i, i) = 1.0;  // exact unit diagonal
  return {std::max(1.0, sol.value), std::move(sm)};
}

/// Full report; C_R is the midpoint of the primal and dual-minus-one values.
inline CoherenceReport coherence_report(const DensityMatrix& rho) {
  auto [primal, w] = robustness_primal(rho);
  auto [dual, s] = robustness_dual(rho);
  CoherenceReport rep;
  rep.gap = std::abs(primal - (dual - 1.0));
  rep.c_r = 0.5 * (primal + (dual - 1.0));
  if (rep.c_r < kRobustnessZeroTol) rep.c_r = 0.0;
  rep.c_max = std::log2(1.0 + rep.c_r);
  rep.witness = std::move(w);
  rep.dual_s = std::move(s);
  return rep;
}

inline double robustness(const DensityMatrix& rho) { return coherence_report(rho).c_r; }

inline double c_max(const DensityMatrix& rho) { return coherence_report(rho).c_max; }

}  // namespace cohdual
