#pragma once

// Quantum objects and their membership checks: states, ensembles, Choi
// channels, POVMs, Kraus sets, and the CPTP / MIO / DIO / incoherent-Kraus /
// incoherent-POVM predicates of the coherence resource theory.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include "linalg.hpp"

namespace cohdual {

inline constexpr double kStateTol = 1e-10;
inline constexpr double kPsdTol = 1e-9;
inline constexpr double kChannelTol = 1e-8;
// Amplitude-level overlap tolerance; tr(rho_a rho_b) carries ~1e-16 of
// round-off, which is ~1e-8 on the amplitude scale, so the cutoff sits above.
inline constexpr double kOrthTol = 1e-7;

class PureState {
 public:
  explicit PureState(ComplexVector amplitudes) : amp_(std::move(amplitudes)) {
    if (amp_.size() < 1) throw std::invalid_argument("PureState: empty amplitude vector");
    if (std::abs(amp_.norm() - 1.0) > 1e-6)
      throw std::invalid_argument("PureState: amplitudes not normalized");
    amp_ /= amp_.norm();
  }
  int dim() const { return static_cast<int>(amp_.size()); }
  const ComplexVector& amplitudes() const { return amp_; }
  ComplexMatrix projector() const { return amp_ * amp_.adjoint(); }

 private:
  ComplexVector amp_;
};

class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix m, double tol = kPsdTol) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() < 1)
      throw std::invalid_argument("DensityMatrix: non-square matrix");
    const double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
    if (hermiticity_error(m_) > 1e-7 * scale)
      throw std::invalid_argument("DensityMatrix: not Hermitian");
    m_ = clip_to_psd(m_, tol);
    if (min_eigenvalue(m_) < -tol)
      throw std::invalid_argument("DensityMatrix: not positive semidefinite");
    if (std::abs(m_.trace().real() - 1.0) > 1e-7)
      throw std::invalid_argument("DensityMatrix: trace not one");
  }
  static DensityMatrix pure(const PureState& psi) { return DensityMatrix(psi.projector()); }

  int dim() const { return static_cast<int>(m_.rows()); }
  const ComplexMatrix& matrix() const { return m_; }

 private:
  ComplexMatrix m_;
};

class StateEnsemble {
 public:
  StateEnsemble(std::vector<double> probs, std::vector<DensityMatrix> states)
      : probs_(std::move(probs)), states_(std::move(states)) {
    if (probs_.empty() || probs_.size() != states_.size())
      throw std::invalid_argument("StateEnsemble: probability/state count mismatch");
    double sum = 0.0;
    for (double p : probs_) {
      if (p < -kStateTol) throw std::invalid_argument("StateEnsemble: negative probability");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-8)
      throw std::invalid_argument("StateEnsemble: probabilities do not sum to one");
    for (const auto& s : states_)
      if (s.dim() != states_[0].dim())
        throw std::invalid_argument("StateEnsemble: mixed dimensions");
  }

  int dim() const { return states_[0].dim(); }
  int size() const { return static_cast<int>(states_.size()); }
  double prob(int j) const { return probs_.at(j); }
  const DensityMatrix& state(int j) const { return states_.at(j); }
  const std::vector<double>& probs() const { return probs_; }

 private:
  std::vector<double> probs_;
  std::vector<DensityMatrix> states_;
};

// Choi-matrix channel, input system first: J = sum_{i,i'} |i><i'| ox N(|i><i'|).
// The output is B ox A' with dim B = discrimination cardinality; A' may be
// trivial (dimension 1) when no reference system is tracked.
class QuantumChannel {
 public:
  QuantumChannel(int dim_in, int dim_out_b, int dim_out_aprime, ComplexMatrix choi,
                 double tol = kChannelTol)
      : din_(dim_in), db_(dim_out_b), da_(dim_out_aprime), choi_(std::move(choi)) {
    if (din_ < 1 || db_ < 1 || da_ < 1)
      throw std::invalid_argument("QuantumChannel: non-positive dimension");
    const Eigen::Index n = static_cast<Eigen::Index>(din_) * db_ * da_;
    if (choi_.rows() != n || choi_.cols() != n)
      throw std::invalid_argument("QuantumChannel: Choi size does not match dimensions");
    choi_ = 0.5 * (choi_ + choi_.adjoint());
    if (min_eigenvalue(choi_, 1e-6) < -tol)
      throw std::invalid_argument("QuantumChannel: Choi not positive semidefinite");
    ComplexMatrix marginal = partial_trace(choi_, {din_, db_ * da_}, {0});
    if ((marginal - identity(din_)).cwiseAbs().maxCoeff() > tol)
      throw std::invalid_argument("QuantumChannel: not trace preserving");
  }

  int dim_in() const { return din_; }
  int dim_out_b() const { return db_; }
  int dim_out_aprime() const { return da_; }
  int dim_out() const { return db_ * da_; }
  const ComplexMatrix& choi() const { return choi_; }

  /// The (i,i') input block N(|i><i'|), of size dim_out x dim_out.
  ComplexMatrix block(int i, int ip) const {
    const int dout = dim_out();
    return choi_.block(static_cast<Eigen::Index>(i) * dout,
                       static_cast<Eigen::Index>(ip) * dout, dout, dout);
  }

 private:
  int din_, db_, da_;
  ComplexMatrix choi_;
};

class POVM {
 public:
  explicit POVM(std::vector<ComplexMatrix> effects, double tol = kPsdTol)
      : effects_(std::move(effects)) {
    if (effects_.empty()) throw std::invalid_argument("POVM: no effects");
    const Eigen::Index d = effects_[0].rows();
    ComplexMatrix sum = ComplexMatrix::Zero(d, d);
    for (auto& e : effects_) {
      if (e.rows() != d || e.cols() != d) throw std::invalid_argument("POVM: mixed effect sizes");
      e = 0.5 * (e + e.adjoint());
      if (min_eigenvalue(e, 1e-6) < -std::max(tol, 1e-7))
        throw std::invalid_argument("POVM: effect not positive semidefinite");
      sum += e;
    }
    if ((sum - identity(d)).cwiseAbs().maxCoeff() > 1e-7)
      throw std::invalid_argument("POVM: effects do not sum to identity");
  }

  int dim() const { return static_cast<int>(effects_[0].rows()); }
  int size() const { return static_cast<int>(effects_.size()); }
  const ComplexMatrix& effect(int j) const { return effects_.at(j); }
  const std::vector<ComplexMatrix>& effects() const { return effects_; }

 private:
  std::vector<ComplexMatrix> effects_;
};

class KrausSet {
 public:
  KrausSet(int dim_in, int dim_out, std::vector<ComplexMatrix> operators)
      : din_(dim_in), dout_(dim_out), ops_(std::move(operators)) {
    if (ops_.empty()) throw std::invalid_argument("KrausSet: no operators");
    ComplexMatrix comp = ComplexMatrix::Zero(din_, din_);
    for (const auto& k : ops_) {
      if (k.rows() != dout_ || k.cols() != din_)
        throw std::invalid_argument("KrausSet: operator shape mismatch");
      comp += k.adjoint() * k;
    }
    if ((comp - identity(din_)).cwiseAbs().maxCoeff() > kChannelTol)
      throw std::invalid_argument("KrausSet: completeness violated");
  }

  int dim_in() const { return din_; }
  int dim_out() const { return dout_; }
  const std::vector<ComplexMatrix>& operators() const { return ops_; }

 private:
  int din_, dout_;
  std::vector<ComplexMatrix> ops_;
};

/// |Psi_d> with all amplitudes 1/sqrt(d).
inline PureState maximally_coherent(int d) {
  if (d < 1) throw std::invalid_argument("maximally_coherent: d must be positive");
  return PureState(ComplexVector::Constant(d, Complex(1.0 / std::sqrt(double(d)), 0.0)));
}

/// d-dimensional Hadamard, shift and clock gates; H X = Z H.
inline std::tuple<ComplexMatrix, ComplexMatrix, ComplexMatrix> weyl_gates(int d) {
  if (d < 2) throw std::invalid_argument("weyl_gates: d must be at least 2");
  const double theta = 2.0 * std::numbers::pi / d;
  ComplexMatrix h(d, d), x = ComplexMatrix::Zero(d, d), z = ComplexMatrix::Zero(d, d);
  const double s = 1.0 / std::sqrt(double(d));
  for (int k = 0; k < d; ++k) {
    for (int j = 0; j < d; ++j)
      h(k, j) = s * Complex(std::cos(theta * ((k * j) % d)), std::sin(theta * ((k * j) % d)));
    x((k + 1) % d, k) = 1.0;
    z(k, k) = Complex(std::cos(theta * k), std::sin(theta * k));
  }
  return {h, x, z};
}

/// Uniform ensemble of the k mutually orthogonal maximally coherent states
/// H X^j |0>, j = 0..k-1.
inline StateEnsemble mcs_ensemble(int d, int k) {
  if (k < 1 || k > d) throw std::invalid_argument("mcs_ensemble: need 1 <= k <= d");
  auto [h, x, z] = weyl_gates(d);
  (void)x;
  (void)z;
  std::vector<double> probs(k, 1.0 / k);
  std::vector<DensityMatrix> states;
  states.reserve(k);
  for (int j = 0; j < k; ++j)
    states.push_back(DensityMatrix::pure(PureState(h.col(j))));  // H X^j |0> = H |j>
  return StateEnsemble(std::move(probs), std::move(states));
}

inline ComplexMatrix apply_channel_raw(const QuantumChannel& n, const ComplexMatrix& rho) {
  if (rho.rows() != n.dim_in() || rho.cols() != n.dim_in())
    throw std::invalid_argument("apply_channel: input dimension mismatch");
  const int dout = n.dim_out();
  ComplexMatrix out = ComplexMatrix::Zero(dout, dout);
  for (int i = 0; i < n.dim_in(); ++i)
    for (int ip = 0; ip < n.dim_in(); ++ip)
      out += rho(i, ip) * n.block(i, ip);
  return out;
}

inline DensityMatrix apply_channel(const QuantumChannel& n, const DensityMatrix& rho) {
  return DensityMatrix(apply_channel_raw(n, rho.matrix()), 1e-7);
}

inline QuantumChannel choi_from_kraus(const KrausSet& k, int dim_out_b, int dim_out_aprime) {
  const int din = k.dim_in();
  ComplexVector w = ComplexVector::Zero(static_cast<Eigen::Index>(din) * din);
  for (int i = 0; i < din; ++i) w(static_cast<Eigen::Index>(i) * din + i) = 1.0;
  ComplexMatrix j = ComplexMatrix::Zero(static_cast<Eigen::Index>(din) * k.dim_out(),
                                        static_cast<Eigen::Index>(din) * k.dim_out());
  for (const auto& op : k.operators()) {
    ComplexVector v = tensor(identity(din), op) * w;
    j += v * v.adjoint();
  }
  return QuantumChannel(din, dim_out_b, dim_out_aprime, std::move(j));
}

inline QuantumChannel choi_from_kraus(const KrausSet& k) {
  return choi_from_kraus(k, k.dim_out(), 1);
}

/// Quantum-classical channel of a POVM: rho -> sum_q tr(E_q rho) |q><q|.
/// Choi operator sum_q E_q^T ox |q><q|.
inline QuantumChannel qc_channel_from_povm(const POVM& m) {
  const int d = m.dim(), k = m.size();
  ComplexMatrix j = ComplexMatrix::Zero(static_cast<Eigen::Index>(d) * k,
                                        static_cast<Eigen::Index>(d) * k);
  for (int q = 0; q < k; ++q)
    j += tensor(m.effect(q).transpose(), unit_matrix(k, k, q, q));
  return QuantumChannel(d, k, 1, std::move(j));
}

/// Incoherent Kraus decomposition of a POVM's quantum-classical channel,
/// K_i^q = sqrt(lambda_i^q) |q><psi_i^q| from the spectral decomposition of E_q.
inline KrausSet io_kraus_from_povm(const POVM& m) {
  const int d = m.dim(), k = m.size();
  std::vector<ComplexMatrix> ops;
  for (int q = 0; q < k; ++q) {
    HermitianEigen eg = hermitian_eigen(m.effect(q));
    for (Eigen::Index i = 0; i < eg.eigenvalues.size(); ++i) {
      const double lam = eg.eigenvalues(i);
      if (lam <= 1e-12) continue;
      ComplexMatrix op = ComplexMatrix::Zero(k, d);
      op.row(q) = std::sqrt(lam) * eg.eigenvectors.col(i).adjoint();
      ops.push_back(std::move(op));
    }
  }
  return KrausSet(d, k, std::move(ops));
}

inline bool is_cptp(const ComplexMatrix& choi, int dim_in, double tol) {
  if (min_eigenvalue(choi, 1e-6) < -tol) return false;
  ComplexMatrix marginal =
      partial_trace(choi, {dim_in, static_cast<int>(choi.rows()) / dim_in}, {0});
  return (marginal - identity(dim_in)).cwiseAbs().maxCoeff() <= tol;
}

inline bool is_cptp(const QuantumChannel& n, double tol = kChannelTol) {
  return is_cptp(n.choi(), n.dim_in(), tol);
}

inline double max_offdiag_abs(const ComplexMatrix& m) {
  double v = 0.0;
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      if (r != c) v = std::max(v, std::abs(m(r, c)));
  return v;
}

/// MIO membership: every incoherent basis state maps to a diagonal output.
/// Linearity over diagonal inputs makes the d diagonal blocks sufficient.
inline bool is_mio(const QuantumChannel& n, double tol = kChannelTol) {
  for (int m = 0; m < n.dim_in(); ++m)
    if (max_offdiag_abs(n.block(m, m)) > tol) return false;
  return true;
}

/// DIO membership: the channel commutes with dephasing,
/// Choi(Delta_out o N) = Choi(N o Delta_in).
inline bool is_dio(const QuantumChannel& n, double tol = kChannelTol) {
  const int din = n.dim_in(), dout = n.dim_out();
  ComplexMatrix lhs = ComplexMatrix::Zero(n.choi().rows(), n.choi().cols());
  ComplexMatrix rhs = lhs;
  for (int i = 0; i < din; ++i)
    for (int ip = 0; ip < din; ++ip) {
      lhs.block(static_cast<Eigen::Index>(i) * dout, static_cast<Eigen::Index>(ip) * dout,
                dout, dout) = dephase(n.block(i, ip));
      if (i == ip)
        rhs.block(static_cast<Eigen::Index>(i) * dout, static_cast<Eigen::Index>(ip) * dout,
                  dout, dout) = n.block(i, ip);
    }
  return (lhs - rhs).norm() <= tol;
}

inline bool is_incoherent_kraus(const KrausSet& k, double tol = kChannelTol) {
  for (const auto& op : k.operators())
    for (int i = 0; i < k.dim_in(); ++i) {
      ComplexVector col = op.col(i);
      if (max_offdiag_abs(col * col.adjoint()) > tol) return false;
    }
  return true;
}

inline bool is_incoherent_povm(const POVM& m, double tol = kChannelTol) {
  for (const auto& e : m.effects())
    if (max_offdiag_abs(e) > tol) return false;
  return true;
}

inline DensityMatrix average_state(const StateEnsemble& e) {
  ComplexMatrix avg = ComplexMatrix::Zero(e.dim(), e.dim());
  for (int j = 0; j < e.size(); ++j) avg += e.prob(j) * e.state(j).matrix();
  return DensityMatrix(std::move(avg));
}

inline double entropy_vn(const DensityMatrix& rho) {
  HermitianEigen eg = hermitian_eigen(rho.matrix());
  double s = 0.0;
  for (Eigen::Index i = 0; i < eg.eigenvalues.size(); ++i) {
    const double lam = eg.eigenvalues(i);
    if (lam > 1e-15) s -= lam * std::log2(lam);
  }
  return s;
}

inline double entropy_min(const DensityMatrix& rho) {
  return -std::log2(hermitian_eigen(rho.matrix()).eigenvalues.maxCoeff());
}

/// Pairwise overlap check; the duality module's perfect-discrimination
/// constraints are exact only for orthogonal pure inputs.
inline bool is_orthogonal_pure_ensemble(const StateEnsemble& e, double tol = kOrthTol) {
  std::vector<ComplexMatrix> mats;
  for (int j = 0; j < e.size(); ++j) {
    const ComplexMatrix& m = e.state(j).matrix();
    if (std::abs((m * m).trace().real() - 1.0) > 1e-7) return false;  // purity
    mats.push_back(m);
  }
  for (size_t a = 0; a < mats.size(); ++a)
    for (size_t b = a + 1; b < mats.size(); ++b) {
      const double overlap_sq = std::max(0.0, (mats[a] * mats[b]).trace().real());
      if (std::sqrt(overlap_sq) > tol) return false;
    }
  return true;
}

}  // namespace cohdual
