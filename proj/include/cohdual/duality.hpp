#pragma once

// Post-discrimination coherence and the coherence-distinguishability duality:
// a see-saw lower bound on C_MIO(Omega), the analytic upper bounds, the
// saturating MIO channel construction, and the boundary/consistency checks.
//
// The see-saw alternates between (a) an SDP over MIO channels that perfectly
// discriminate the ensemble, maximizing sum_j p_j tr(S_j sigma_j) for fixed
// witnesses S_j, and (b) refreshing each S_j via the dual robustness SDP of
// sigma_j. Perfect discrimination of an orthogonal pure ensemble forces the
// Choi operator J to annihilate every vector conj(psi_j) ox |m> ox |a> with
// m != j, so J is parameterized as V K V* on the orthogonal complement of
// that kernel (facial reduction). This keeps the feasible set full-dimensional
// for the interior-point solver and makes perfect discrimination exact by
// construction.

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include "conic.hpp"
#include "discrimination.hpp"
#include "linalg.hpp"
#include "measures.hpp"
#include "quantum.hpp"

namespace cohdual {

struct SeeSawOptions {
  int max_rounds = 30;
  double stall_tol = 1e-7;  // stop when the round-over-round gain drops below
  int restarts = 3;         // randomized witness re-initializations
  unsigned long long seed = 0;
  SolveOptions solver{};
};

struct DualityReport {
  int d = 0;
  int k = 0;
  double s_vn = 0.0;   // S(Omega), von Neumann entropy of the average state
  double s_min = 0.0;  // S_min(Omega) = -log2 p_max
  double c_lower = 0.0;
  double bound = 0.0;  // log2 d - s_vn (uniform) or log2 d - s_min
  double gap = 0.0;    // bound - c_lower
  QuantumChannel channel;
  std::vector<DensityMatrix> sigmas;
  int rounds = 0;            // rounds executed by the run reporting c_lower
  bool degraded = false;     // a solver failure truncated some run
  bool bound_not_tight = false;  // non-uniform priors: S_min bound in use
  std::vector<double> round_objectives;  // per-round objective of that run
};

/// Theorem 1 / Theorem S2 upper bound, log2(1 + p_max (d - k)); equals
/// log2 d - log2 k for uniform priors.
inline double duality_bound(const StateEnsemble& e) {
  if (!is_orthogonal_pure_ensemble(e))
    throw std::invalid_argument("duality_bound: requires a mutually orthogonal pure ensemble");
  double p_max = 0.0;
  for (double p : e.probs()) p_max = std::max(p_max, p);
  return std::log2(1.0 + p_max * (e.dim() - e.size()));
}

namespace detail {

inline bool is_uniform(const StateEnsemble& e, double tol = 1e-9) {
  for (double p : e.probs())
    if (std::abs(p - 1.0 / e.size()) > tol) return false;
  return true;
}

/// Reduced parameterization of Choi operators that perfectly discriminate a
/// given orthogonal pure ensemble: J = V K V* with the columns of V spanning
/// the complement of the forced kernel. Column order: first the "diagonal"
/// columns conj(psi_j) ox |j> ox |a> (index j*d + a), then the "tail" columns
/// phi_t ox |m> ox |a> (index k*d + ((t-k)*k + m)*d + a) with {phi_t} an
/// orthonormal completion of {conj(psi_j)}.
struct ReducedChoiBasis {
  int d = 0, k = 0, np = 0;
  std::vector<ComplexVector> phi;  // d basis vectors, phi[j] = conj(psi_j) for j < k

  explicit ReducedChoiBasis(const StateEnsemble& e) : d(e.dim()), k(e.size()) {
    np = k * d * (d - k + 1);
    ComplexMatrix psi(d, k);
    for (int j = 0; j < k; ++j) {
      HermitianEigen eg = hermitian_eigen(e.state(j).matrix());
      psi.col(j) = eg.eigenvectors.col(0).conjugate();
    }
    ComplexMatrix q = Eigen::HouseholderQR<ComplexMatrix>(psi)
                          .householderQ() * ComplexMatrix::Identity(d, d);
    phi.resize(d);
    for (int j = 0; j < k; ++j) phi[j] = psi.col(j);
    for (int t = k; t < d; ++t) phi[t] = q.col(t);
  }

  /// Basis vectors admissible in the A factor for output-B index m.
  std::vector<int> admissible(int m) const {
    std::vector<int> c{m};
    for (int t = k; t < d; ++t) c.push_back(t);
    return c;
  }

  int col(int c, int m, int a) const {
    return c < k ? m * d + a : k * d + ((c - k) * k + m) * d + a;
  }

  /// V as a dense (d*k*d) x np isometry; row layout (i_A, m_B, a_A').
  ComplexMatrix isometry() const {
    ComplexMatrix v = ComplexMatrix::Zero(static_cast<Eigen::Index>(d) * k * d, np);
    for (int m = 0; m < k; ++m)
      for (int a = 0; a < d; ++a)
        for (int c : admissible(m))
          for (int i = 0; i < d; ++i)
            v((static_cast<Eigen::Index>(i) * k + m) * d + a, col(c, m, a)) = phi[c](i);
    return v;
  }
};

/// Append Re (and optionally Im) of the complex equality
/// sum_e w_e K[r_e, c_e] = beta to the problem, using that K is Hermitian.
inline void add_complex_equality(SDProblem& p, int blk,
                                 const std::vector<std::tuple<int, int, Complex>>& terms,
                                 Complex beta, bool emit_im) {
  LinearFunctional fre;
  for (const auto& [r, c, w] : terms) {
    if (r == c) fre.add_herm(blk, r, r, Complex(w.real(), 0.0));
    else fre.add_herm(blk, c, r, 0.5 * w);
  }
  p.add_equality(std::move(fre), beta.real());
  if (!emit_im) return;
  LinearFunctional fim;
  for (const auto& [r, c, w] : terms) {
    const Complex wi = Complex(0.0, -1.0) * w;
    if (r == c) fim.add_herm(blk, r, r, Complex(wi.real(), 0.0));
    else fim.add_herm(blk, c, r, 0.5 * wi);
  }
  p.add_equality(std::move(fim), beta.imag());
}

/// Constraint skeleton of the channel SDP (everything except the objective):
/// K >= 0 (the block), trace preservation, and the MIO conditions.
inline SDProblem reduced_channel_constraints(const ReducedChoiBasis& rb) {
  const int d = rb.d, k = rb.k;
  SDProblem p;
  p.add_block(rb.np);

  // Trace preservation: tr_{BA'} J = I_A, one complex equality per (i, i').
  for (int i = 0; i < d; ++i)
    for (int ip = i; ip < d; ++ip) {
      std::vector<std::tuple<int, int, Complex>> terms;
      for (int m = 0; m < k; ++m) {
        const std::vector<int> cm = rb.admissible(m);
        for (int a = 0; a < d; ++a)
          for (int c : cm)
            for (int cp : cm)
              terms.emplace_back(rb.col(c, m, a), rb.col(cp, m, a),
                                 rb.phi[c](i) * std::conj(rb.phi[cp](ip)));
      }
      add_complex_equality(p, 0, terms, i == ip ? Complex(1.0) : Complex(0.0), i != ip);
    }

  // MIO: every off-diagonal entry (o, o') of N(|m><m|) vanishes. For fixed
  // output-B indices (mb, mb') the d coefficient vectors over inputs m span a
  // subspace of dimension at most min(d, s^2), s = d - k + 1; a Gram-Schmidt
  // reduced spanning set is emitted instead of all d constraints (for k near
  // d the raw set is massively redundant and would bloat the Schur system).
  const int s = d - k + 1;
  std::vector<std::vector<ComplexVector>> reduced(k * k);
  for (int mb = 0; mb < k; ++mb)
    for (int mbp = 0; mbp < k; ++mbp) {
      const std::vector<int> cm = rb.admissible(mb), cmp = rb.admissible(mbp);
      std::vector<ComplexVector> raw(d, ComplexVector(s * s));
      double nmax = 0.0;
      for (int m = 0; m < d; ++m) {
        for (int ci = 0; ci < s; ++ci)
          for (int cj = 0; cj < s; ++cj)
            raw[m](ci * s + cj) = rb.phi[cm[ci]](m) * std::conj(rb.phi[cmp[cj]](m));
        nmax = std::max(nmax, raw[m].norm());
      }
      std::vector<ComplexVector>& kept = reduced[mb * k + mbp];
      for (int m = 0; m < d; ++m) {
        ComplexVector w = raw[m];
        for (const ComplexVector& u : kept) w -= u.dot(w) * u;
        if (w.norm() > 1e-10 * nmax) kept.push_back(w / w.norm());
      }
    }
  const int dout = k * d;
  for (int o = 0; o < dout; ++o)
    for (int op = o + 1; op < dout; ++op) {
      const int mb = o / d, a = o % d, mbp = op / d, ap = op % d;
      const std::vector<int> cm = rb.admissible(mb), cmp = rb.admissible(mbp);
      for (const ComplexVector& w : reduced[mb * k + mbp]) {
        std::vector<std::tuple<int, int, Complex>> terms;
        for (int ci = 0; ci < s; ++ci)
          for (int cj = 0; cj < s; ++cj) {
            const Complex v = w(ci * s + cj);
            if (v != Complex(0.0))
              terms.emplace_back(rb.col(cm[ci], mb, a), rb.col(cmp[cj], mbp, ap), v);
          }
        add_complex_equality(p, 0, terms, Complex(0.0), true);
      }
    }
  return p;
}

}  // namespace detail

/// See-saw lower bound on C_MIO(Omega) with the full duality report.
inline DualityReport post_discrimination_coherence(const StateEnsemble& e,
                                                   const SeeSawOptions& opts = {}) {
  if (opts.max_rounds < 1)
    throw std::invalid_argument("post_discrimination_coherence: max_rounds must be >= 1");
  if (!is_orthogonal_pure_ensemble(e))
    throw std::invalid_argument(
        "post_discrimination_coherence: requires a mutually orthogonal pure-state ensemble");
  const int d = e.dim(), k = e.size();

  const detail::ReducedChoiBasis rb(e);
  const SDProblem skeleton = detail::reduced_channel_constraints(rb);
  const double obj_cap = 1.0 + [&] {
    double p_max = 0.0;
    for (double p : e.probs()) p_max = std::max(p_max, p);
    return p_max * (d - k);
  }();  // Theorem S2 ceiling on the see-saw objective

  double best_obj = -1.0;
  ComplexMatrix best_k;
  std::vector<ComplexMatrix> best_sigmas;
  std::vector<double> best_objs;
  int best_rounds = 0;
  bool degraded = false;

  auto run = [&](std::vector<ComplexMatrix> witnesses) {
    double prev = -1.0;
    std::vector<double> objs;
    for (int round = 0; round < opts.max_rounds; ++round) {
      SDProblem p = skeleton;
      ComplexMatrix a = ComplexMatrix::Zero(rb.np, rb.np);
      for (int j = 0; j < k; ++j)
        a.block(static_cast<Eigen::Index>(j) * d, static_cast<Eigen::Index>(j) * d, d, d) =
            e.prob(j) * witnesses[j];
      p.objective.add_matrix(0, a);
      SDPSolution sol = solve(p, opts.solver);
      if (sol.status != SDPStatus::Optimal) {
        degraded = true;
        return;
      }
      std::vector<ComplexMatrix> sigmas(k);
      double obj = 0.0;
      for (int j = 0; j < k; ++j) {
        ComplexMatrix sig = sol.blocks[0].block(static_cast<Eigen::Index>(j) * d,
                                                static_cast<Eigen::Index>(j) * d, d, d);
        sig /= sig.trace().real();  // trace preservation pins this to 1
        auto [val, wit] = robustness_dual(DensityMatrix(sig, 1e-7));
        obj += e.prob(j) * val;
        witnesses[j] = std::move(wit);
        sigmas[j] = std::move(sig);
      }
      objs.push_back(obj);
      if (obj > best_obj) {
        best_obj = obj;
        best_k = sol.blocks[0];
        best_sigmas = std::move(sigmas);
        best_rounds = round + 1;
        best_objs = objs;
      }
      if (best_obj >= obj_cap - 1e-9) return;  // bound reached, provably done
      if (round > 0 && obj - prev < opts.stall_tol) return;
      prev = obj;
    }
  };

  // deterministic first run: all-ones witnesses
  run(std::vector<ComplexMatrix>(k, ComplexMatrix::Constant(d, d, Complex(1.0))));
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  for (int r = 0; r < opts.restarts && best_obj < obj_cap - 1e-9; ++r) {
    // random rank-one witnesses u u* with unit-modulus entries: dual feasible
    // and extremal, the shape an optimal witness takes on pure-like sigma
    std::vector<ComplexMatrix> ws(k);
    for (int j = 0; j < k; ++j) {
      ComplexVector u(d);
      for (int i = 0; i < d; ++i) {
        const double th = angle(rng);
        u(i) = Complex(std::cos(th), std::sin(th));
      }
      ws[j] = u * u.adjoint();
    }
    run(std::move(ws));
  }
  if (best_obj < 0.0)
    throw std::runtime_error("post_discrimination_coherence: no see-saw round solved");

  const bool uniform = detail::is_uniform(e);
  const DensityMatrix avg = average_state(e);
  const double s_vn = entropy_vn(avg), s_min = entropy_min(avg);
  double bound = std::log2(double(d)) - (uniform ? s_vn : s_min);
  if (std::abs(bound) < 1e-12) bound = 0.0;  // k = d round-off
  const double c_lower = std::max(0.0, std::log2(best_obj));

  std::vector<DensityMatrix> sigmas;
  sigmas.reserve(k);
  for (const auto& sig : best_sigmas) sigmas.emplace_back(sig, 1e-7);
  const ComplexMatrix v = rb.isometry();
  QuantumChannel channel(d, k, d, v * best_k * v.adjoint(), 1e-6);

  return DualityReport{d, k, s_vn, s_min, c_lower, bound, bound - c_lower,
                       std::move(channel), std::move(sigmas), best_rounds,
                       degraded, !uniform, std::move(best_objs)};
}

/// Proposition 3 construction: an MIO channel mapping the first k maximally
/// coherent states to |i><i| ox sigma with C_R(sigma) = (d-k)/k, and every
/// incoherent basis state to Pi ox I/d.
inline std::tuple<QuantumChannel, DensityMatrix, DensityMatrix> saturating_channel(int d, int k) {
  if (d < 2 || k < 1 || k > d)
    throw std::invalid_argument("saturating_channel: need d >= 2 and 1 <= k <= d");
  ComplexMatrix sigma = ComplexMatrix::Constant(d, d, Complex((d - k) / (k * (d - 1.0) * d)));
  ComplexMatrix sigma_prime = ComplexMatrix::Constant(d, d, Complex(-1.0 / ((d - 1.0) * d)));
  for (int i = 0; i < d; ++i) sigma(i, i) = sigma_prime(i, i) = 1.0 / d;

  ComplexMatrix pi = ComplexMatrix::Zero(k, k);
  for (int i = 0; i < k; ++i) pi(i, i) = 1.0 / k;

  auto [h, x, z] = weyl_gates(d);
  (void)x;
  (void)z;
  ComplexMatrix j = ComplexMatrix::Zero(static_cast<Eigen::Index>(d) * k * d,
                                        static_cast<Eigen::Index>(d) * k * d);
  for (int i = 0; i < d; ++i) {
    const ComplexMatrix proj = (h.col(i) * h.col(i).adjoint()).transpose();
    j += tensor(proj, i < k ? tensor(ComplexMatrix(unit_matrix(k, k, i, i)), sigma)
                            : tensor(pi, sigma_prime));
  }
  return {QuantumChannel(d, k, d, std::move(j)), DensityMatrix(std::move(sigma)),
          DensityMatrix(std::move(sigma_prime))};
}

/// Proposition S4: C_max(avg) + S(avg) = log2 d is necessary for saturation
/// of the uniform duality bound when k < d. Returns (holds, lhs).
inline std::pair<bool, double> necessary_condition(const StateEnsemble& e) {
  if (!is_orthogonal_pure_ensemble(e))
    throw std::invalid_argument("necessary_condition: requires a mutually orthogonal pure ensemble");
  if (!detail::is_uniform(e))
    throw std::invalid_argument("necessary_condition: stated for uniform ensembles only");
  if (e.size() >= e.dim())
    throw std::invalid_argument("necessary_condition: stated for k < d only");
  const DensityMatrix avg = average_state(e);
  const double lhs = c_max(avg) + entropy_vn(avg);
  return {std::abs(lhs - std::log2(double(e.dim()))) <= 1e-4, lhs};
}

/// Lemma S3: for an MIO channel that perfectly discriminates the ensemble,
/// log2(1 + sum_j p_j C_R(sigma_j)) equals C_max of the average output.
/// Returns (lhs, rhs); the contract is |lhs - rhs| <= 1e-5 at the optimum.
inline std::pair<double, double> lemma_s3_check(const StateEnsemble& e, const QuantumChannel& n,
                                                double tol = 1e-6) {
  if (!is_mio(n, tol))
    throw std::invalid_argument("lemma_s3_check: channel is not MIO");
  if (channel_success(n, e) < 1.0 - 1e-7)
    throw std::invalid_argument("lemma_s3_check: channel does not perfectly discriminate");
  const int da = n.dim_out_aprime();
  double sum = 0.0;
  for (int j = 0; j < e.size(); ++j) {
    ComplexMatrix out = apply_channel_raw(n, e.state(j).matrix());
    ComplexMatrix sig = out.block(static_cast<Eigen::Index>(j) * da,
                                  static_cast<Eigen::Index>(j) * da, da, da);
    sig /= sig.trace().real();
    sum += e.prob(j) * robustness(DensityMatrix(sig, 1e-6));
  }
  const double lhs = std::log2(1.0 + sum);
  const double rhs = c_max(apply_channel(n, average_state(e)));
  return {lhs, rhs};
}

}  // namespace cohdual
