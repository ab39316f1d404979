#pragma once

// Dense complex matrix kernel: tensor products, partial traces, dephasing,
// Hermitian eigendecomposition and norms. All higher layers express states,
// effects and Choi operators in terms of these primitives.

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <vector>

namespace cohdual {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

// Dense-only kernel; desk-scale Choi matrices never get near this.
inline constexpr int kMaxDim = 4096;

inline constexpr double kHermTol = 1e-8;
inline constexpr double kEigClipTol = 1e-9;

inline void check_dim(Eigen::Index rows, Eigen::Index cols) {
  if (rows <= 0 || cols <= 0 || rows > kMaxDim || cols > kMaxDim)
    throw std::invalid_argument("matrix dimensions out of supported range");
}

inline bool has_finite_entries(const ComplexMatrix& m) {
  return m.allFinite();
}

/// Kronecker product, block (i,i') equals a(i,i') * b.
inline ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  check_dim(a.rows() * b.rows(), a.cols() * b.cols());
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Partial trace over the complement of `keep`. `dims` lists subsystem
/// dimensions from the most significant tensor factor down; `keep` holds the
/// subsystem indices to retain, in their original order.
inline ComplexMatrix partial_trace(const ComplexMatrix& m,
                                   const std::vector<int>& dims,
                                   const std::vector<int>& keep) {
  if (m.rows() != m.cols()) throw std::invalid_argument("partial_trace: non-square input");
  Eigen::Index total = 1;
  for (int d : dims) {
    if (d <= 0) throw std::invalid_argument("partial_trace: non-positive subsystem dimension");
    total *= d;
  }
  if (total != m.rows()) throw std::invalid_argument("partial_trace: dims do not match matrix size");

  const int ns = static_cast<int>(dims.size());
  std::vector<bool> kept(ns, false);
  for (int s : keep) {
    if (s < 0 || s >= ns) throw std::invalid_argument("partial_trace: subsystem index out of range");
    kept[s] = true;
  }

  Eigen::Index keep_dim = 1, trace_dim = 1;
  for (int s = 0; s < ns; ++s) (kept[s] ? keep_dim : trace_dim) *= dims[s];

  // strides of each subsystem in the composite (row-major tensor order)
  std::vector<Eigen::Index> stride(ns);
  Eigen::Index acc = 1;
  for (int s = ns - 1; s >= 0; --s) {
    stride[s] = acc;
    acc *= dims[s];
  }

  std::vector<int> keep_sys, trace_sys;
  for (int s = 0; s < ns; ++s) (kept[s] ? keep_sys : trace_sys).push_back(s);

  auto expand = [&](Eigen::Index idx, const std::vector<int>& sys) {
    // map a flat index over `sys` to a composite index
    Eigen::Index comp = 0;
    for (int p = static_cast<int>(sys.size()) - 1; p >= 0; --p) {
      int s = sys[p];
      comp += (idx % dims[s]) * stride[s];
      idx /= dims[s];
    }
    return comp;
  };

  ComplexMatrix out = ComplexMatrix::Zero(keep_dim, keep_dim);
  for (Eigen::Index r = 0; r < keep_dim; ++r) {
    const Eigen::Index rr = expand(r, keep_sys);
    for (Eigen::Index c = 0; c < keep_dim; ++c) {
      const Eigen::Index cc = expand(c, keep_sys);
      Complex sum = 0.0;
      for (Eigen::Index t = 0; t < trace_dim; ++t) {
        const Eigen::Index tt = expand(t, trace_sys);
        sum += m(rr + tt, cc + tt);
      }
      out(r, c) = sum;
    }
  }
  return out;
}

/// Diagonal projection in the computational basis.
inline ComplexMatrix dephase(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("dephase: non-square input");
  ComplexMatrix out = ComplexMatrix::Zero(m.rows(), m.cols());
  out.diagonal() = m.diagonal();
  return out;
}

struct HermitianEigen {
  RealVector eigenvalues;      // descending
  ComplexMatrix eigenvectors;  // orthonormal columns, matching order
};

inline double hermiticity_error(const ComplexMatrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

/// Full spectral decomposition of a Hermitian matrix; the input is
/// symmetrized first, inputs that are non-Hermitian beyond `tol` are rejected.
inline HermitianEigen hermitian_eigen(const ComplexMatrix& m, double tol = kHermTol) {
  if (m.rows() != m.cols()) throw std::invalid_argument("hermitian_eigen: non-square input");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (hermiticity_error(m) > tol * scale)
    throw std::invalid_argument("hermitian_eigen: input not Hermitian within tolerance");
  ComplexMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("hermitian_eigen: eigensolver failed");
  const Eigen::Index n = m.rows();
  HermitianEigen out;
  out.eigenvalues = es.eigenvalues().reverse();
  out.eigenvectors = ComplexMatrix(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    out.eigenvectors.col(i) = es.eigenvectors().col(n - 1 - i);
  return out;
}

/// Sum of singular values.
inline double trace_norm(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("trace_norm: non-square input");
  if (m.rows() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues().sum();
}

inline double min_eigenvalue(const ComplexMatrix& m, double herm_tol = kHermTol) {
  return hermitian_eigen(m, herm_tol).eigenvalues.minCoeff();
}

inline bool is_psd(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (hermiticity_error(m) > std::max(tol, kHermTol) * scale) return false;
  return min_eigenvalue(m, std::max(tol, kHermTol)) >= -tol;
}

/// Symmetrize and clip eigenvalues in (-clip_tol, 0) to zero. Used to clean
/// density matrices coming out of solver residues.
inline ComplexMatrix clip_to_psd(const ComplexMatrix& m, double clip_tol = kEigClipTol) {
  HermitianEigen eg = hermitian_eigen(m, 1e-6);
  RealVector ev = eg.eigenvalues;
  bool clipped = false;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev(i) < 0.0 && ev(i) > -clip_tol) {
      ev(i) = 0.0;
      clipped = true;
    }
  // leave already-PSD inputs bit-exact
  if (!clipped) return 0.5 * (m + m.adjoint());
  return eg.eigenvectors * ev.asDiagonal() * eg.eigenvectors.adjoint();
}

inline ComplexMatrix identity(Eigen::Index n) { return ComplexMatrix::Identity(n, n); }

/// |i><j| in dimension (rows, cols).
inline ComplexMatrix unit_matrix(Eigen::Index rows, Eigen::Index cols,
                                 Eigen::Index i, Eigen::Index j) {
  ComplexMatrix m = ComplexMatrix::Zero(rows, cols);
  m(i, j) = 1.0;
  return m;
}

}  // namespace cohdual
