#pragma once

// Minimum-error state discrimination: the unrestricted POVM optimum (SDP),
// the two-state Helstrom closed form, the exact combinatorial optimum over
// incoherent (diagonal) POVMs, its ancilla-assisted variant, and construction
// of an incoherent-operation channel achieving the unrestricted optimum.

#include <stdexcept>
#include <vector>

#include "conic.hpp"
#include "linalg.hpp"
#include "quantum.hpp"

namespace cohdual {

enum class DiscriminationClass { kUnrestricted, kIncoherent, kIncoherentAncilla };

struct DiscriminationResult {
  double value = 0.0;
  POVM povm;
  DiscriminationClass povm_class = DiscriminationClass::kUnrestricted;
};

/// Two-state oracle: 1/2 (1 + ||p0 rho0 - p1 rho1||_1).
inline double helstrom(double p0, const DensityMatrix& rho0, double p1,
                       const DensityMatrix& rho1) {
  if (std::abs(p0 + p1 - 1.0) > 1e-9)
    throw std::invalid_argument("helstrom: probabilities must sum to one");
  return 0.5 * (1.0 + trace_norm(p0 * rho0.matrix() - p1 * rho1.matrix()));
}

/// Optimal unrestricted discrimination, max_E sum_j p_j tr(E_j rho_j).
inline DiscriminationResult p_suc_optimal(const StateEnsemble& e) {
  const int d = e.dim(), k = e.size();
  if (k == 1) return {1.0, POVM({identity(d)}), DiscriminationClass::kUnrestricted};

  SDProblem p;
  for (int j = 0; j < k; ++j) {
    p.add_block(d);
    p.objective.add_matrix(j, ComplexMatrix(e.prob(j) * e.state(j).matrix()));
  }
  for (int r = 0; r < d; ++r)
    for (int c = r; c < d; ++c) {
      LinearFunctional fre;
      for (int j = 0; j < k; ++j)
        fre.add_herm(j, r, c, r == c ? Complex(1.0) : Complex(0.5));
      p.add_equality(std::move(fre), r == c ? 1.0 : 0.0);
      if (r != c) {
        LinearFunctional fim;
        for (int j = 0; j < k; ++j) fim.add_herm(j, r, c, Complex(0.0, -0.5));
        p.add_equality(std::move(fim), 0.0);
      }
    }
  SDPSolution sol = solve(p);
  if (sol.status != SDPStatus::Optimal)
    throw std::runtime_error("p_suc_optimal: SDP solver did not converge");

  // hand back a strictly valid POVM: clip each effect to the PSD cone, then
  // renormalize the family by G^{-1/2} (.) G^{-1/2} with G their sum
  std::vector<ComplexMatrix> effects(sol.blocks.begin(), sol.blocks.end());
  ComplexMatrix g = ComplexMatrix::Zero(d, d);
  for (auto& eff : effects) {
    eff = clip_to_psd(eff, 1e-7);
    g += eff;
  }
  HermitianEigen eg = hermitian_eigen(g);
  ComplexMatrix gih = eg.eigenvectors *
                      eg.eigenvalues.cwiseMax(1e-12).cwiseSqrt().cwiseInverse()
                          .asDiagonal().toDenseMatrix().cast<Complex>() *
                      eg.eigenvectors.adjoint();
  for (auto& eff : effects) eff = gih * eff * gih;
  DiscriminationResult res{sol.value, POVM(std::move(effects)),
                           DiscriminationClass::kUnrestricted};
  return res;
}

/// Exact optimum over incoherent (diagonal) POVMs: each basis index i is
/// assigned in full to an outcome maximizing p_j <i|rho_j|i>, ties broken
/// toward the smallest outcome index.
inline DiscriminationResult p_suc_incoherent(const StateEnsemble& e) {
  const int d = e.dim(), k = e.size();
  std::vector<ComplexMatrix> effects(k, ComplexMatrix::Zero(d, d));
  double value = 0.0;
  for (int i = 0; i < d; ++i) {
    int best_j = 0;
    double best = e.prob(0) * e.state(0).matrix()(i, i).real();
    for (int j = 1; j < k; ++j) {
      const double v = e.prob(j) * e.state(j).matrix()(i, i).real();
      if (v > best) {
        best = v;
        best_j = j;
      }
    }
    value += best;
    effects[best_j](i, i) = 1.0;
  }
  return {value, POVM(std::move(effects)), DiscriminationClass::kIncoherent};
}

/// Incoherent discrimination of {(p_j, rho_j ox tau)}. The diagonal of the
/// tensor factorizes, sum_a tau_aa = 1, so the optimum equals the unassisted
/// one exactly; the returned value uses that factorization and the returned
/// POVM is the unassisted one extended by identity on the ancilla.
inline DiscriminationResult p_suc_incoherent_with_ancilla(const StateEnsemble& e,
                                                          const DensityMatrix& tau) {
  DiscriminationResult base = p_suc_incoherent(e);
  std::vector<ComplexMatrix> effects;
  effects.reserve(base.povm.size());
  for (const auto& eff : base.povm.effects())
    effects.push_back(tensor(eff, identity(tau.dim())));
  return {base.value, POVM(std::move(effects)), DiscriminationClass::kIncoherentAncilla};
}

/// sum_j p_j tr[N(rho_j)(|j><j| ox I_{A'})].
inline double channel_success(const QuantumChannel& n, const StateEnsemble& e) {
  if (n.dim_in() != e.dim())
    throw std::invalid_argument("channel_success: input dimension mismatch");
  if (n.dim_out_b() != e.size())
    throw std::invalid_argument("channel_success: output B dimension must equal ensemble size");
  const int da = n.dim_out_aprime();
  double s = 0.0;
  for (int j = 0; j < e.size(); ++j) {
    ComplexMatrix out = apply_channel_raw(n, e.state(j).matrix());
    for (int a = 0; a < da; ++a) s += e.prob(j) * out(j * da + a, j * da + a).real();
  }
  return s;
}

struct IoDiscriminationChannel {
  KrausSet kraus;
  QuantumChannel channel;
  double value = 0.0;
};

/// Incoherent-operation channel achieving the unrestricted optimum: the
/// optimal POVM's quantum-classical channel via its incoherent Kraus form.
inline IoDiscriminationChannel optimal_io_discrimination_channel(const StateEnsemble& e) {
  DiscriminationResult opt = p_suc_optimal(e);
  KrausSet kraus = io_kraus_from_povm(opt.povm);
  QuantumChannel channel = choi_from_kraus(kraus, e.size(), 1);
  double value = channel_success(channel, e);
  return {std::move(kraus), std::move(channel), value};
}

}  // namespace cohdual
