#include <gtest/gtest.h>

#include <random>

#include "cohdual/linalg.hpp"

namespace cohdual {
namespace {

ComplexMatrix random_complex(int r, int c, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  ComplexMatrix m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = Complex(g(rng), g(rng));
  return m;
}

ComplexMatrix random_hermitian(int d, std::mt19937_64& rng) {
  ComplexMatrix m = random_complex(d, d, rng);
  return 0.5 * (m + m.adjoint());
}

ComplexMatrix random_unitary(int d, std::mt19937_64& rng) {
  Eigen::HouseholderQR<ComplexMatrix> qr(random_complex(d, d, rng));
  return qr.householderQ() * ComplexMatrix::Identity(d, d);
}

ComplexMatrix psi_d(int d) {
  return ComplexMatrix::Constant(d, d, Complex(1.0 / d, 0.0));
}

TEST(Tensor, IdentityCase) {
  EXPECT_NEAR((tensor(identity(2), identity(2)) - identity(4)).cwiseAbs().maxCoeff(), 0.0, 0.0);
}

TEST(Tensor, BasisProjectors) {
  ComplexMatrix p0 = unit_matrix(2, 2, 0, 0), p1 = unit_matrix(2, 2, 1, 1);
  ComplexMatrix t = tensor(p0, p1);
  ComplexMatrix expect = ComplexMatrix::Zero(4, 4);
  expect(1, 1) = 1.0;
  EXPECT_NEAR((t - expect).cwiseAbs().maxCoeff(), 0.0, 0.0);
}

TEST(Tensor, MaximallyCoherentProduct) {
  // Psi_2 ox Psi_2: every entry 1/4
  ComplexMatrix t = tensor(psi_d(2), psi_d(2));
  EXPECT_NEAR((t - ComplexMatrix::Constant(4, 4, Complex(0.25))).cwiseAbs().maxCoeff(), 0.0, 1e-15);
}

TEST(Tensor, AssociativeAndUnit) {
  std::mt19937_64 rng(1);
  ComplexMatrix a = random_complex(2, 2, rng), b = random_complex(3, 3, rng),
                c = random_complex(2, 2, rng);
  EXPECT_NEAR((tensor(tensor(a, b), c) - tensor(a, tensor(b, c))).cwiseAbs().maxCoeff(), 0.0, 1e-14);
  EXPECT_NEAR((tensor(a, identity(1)) - a).cwiseAbs().maxCoeff(), 0.0, 0.0);
}

TEST(PartialTrace, ProductState) {
  std::mt19937_64 rng(2);
  ComplexMatrix rho = random_hermitian(3, rng);
  ComplexMatrix full = tensor(unit_matrix(2, 2, 0, 0), rho);
  ComplexMatrix out = partial_trace(full, {2, 3}, {1});
  EXPECT_NEAR((out - rho).cwiseAbs().maxCoeff(), 0.0, 1e-12);
}

TEST(PartialTrace, MaximallyCoherentMarginal) {
  ComplexMatrix out = partial_trace(tensor(psi_d(2), psi_d(2)), {2, 2}, {0});
  EXPECT_NEAR((out - psi_d(2)).cwiseAbs().maxCoeff(), 0.0, 1e-12);
}

TEST(PartialTrace, MaximallyMixed) {
  ComplexMatrix out = partial_trace(0.25 * identity(4), {2, 2}, {0});
  EXPECT_NEAR((out - 0.5 * identity(2)).cwiseAbs().maxCoeff(), 0.0, 1e-12);
}

TEST(PartialTrace, TracePreservedAndFactorization) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    ComplexMatrix a = random_complex(3, 3, rng), b = random_complex(2, 2, rng);
    ComplexMatrix full = tensor(a, b);
    ComplexMatrix keep_first = partial_trace(full, {3, 2}, {0});
    EXPECT_NEAR((keep_first - b.trace() * a).cwiseAbs().maxCoeff(), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(partial_trace(full, {3, 2}, {1}).trace() - full.trace()), 0.0, 1e-12);
  }
}

TEST(PartialTrace, RejectsDimensionMismatch) {
  EXPECT_THROW(partial_trace(identity(4), {3, 2}, {0}), std::invalid_argument);
}

TEST(Dephase, UniformOffDiagonalsRemoved) {
  EXPECT_NEAR((dephase(psi_d(2)) - 0.5 * identity(2)).cwiseAbs().maxCoeff(), 0.0, 0.0);
}

TEST(Dephase, FixedPointOnDiagonal) {
  ComplexMatrix d = ComplexMatrix::Zero(3, 3);
  d(0, 0) = 0.2; d(1, 1) = 0.3; d(2, 2) = 0.5;
  EXPECT_NEAR((dephase(d) - d).cwiseAbs().maxCoeff(), 0.0, 0.0);
}

TEST(Dephase, IdempotentAndSelfAdjoint) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    ComplexMatrix m = random_complex(4, 4, rng);
    EXPECT_NEAR((dephase(dephase(m)) - dephase(m)).cwiseAbs().maxCoeff(), 0.0, 1e-12);
    ComplexMatrix a = random_hermitian(4, rng), b = random_hermitian(4, rng);
    EXPECT_NEAR((a * dephase(b)).trace().real(), (dephase(a) * b).trace().real(), 1e-10);
  }
}

TEST(HermitianEigenDecomp, Identity) {
  HermitianEigen eg = hermitian_eigen(identity(4));
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(eg.eigenvalues(i), 1.0, 1e-12);
}

TEST(HermitianEigenDecomp, PureProjector) {
  HermitianEigen eg = hermitian_eigen(psi_d(2));
  EXPECT_NEAR(eg.eigenvalues(0), 1.0, 1e-12);
  EXPECT_NEAR(eg.eigenvalues(1), 0.0, 1e-12);
}

TEST(HermitianEigenDecomp, TracelessDifference) {
  // |0><0| - Psi_2 has eigenvalues +-1/sqrt(2)
  ComplexMatrix m = unit_matrix(2, 2, 0, 0) - psi_d(2);
  HermitianEigen eg = hermitian_eigen(m);
  EXPECT_NEAR(eg.eigenvalues(0), 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(eg.eigenvalues(1), -1.0 / std::sqrt(2.0), 1e-12);
}

TEST(HermitianEigenDecomp, ReconstructionAndOrthonormality) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    ComplexMatrix m = random_hermitian(5, rng);
    HermitianEigen eg = hermitian_eigen(m);
    ComplexMatrix rec = eg.eigenvectors * eg.eigenvalues.asDiagonal().toDenseMatrix().cast<Complex>() *
                        eg.eigenvectors.adjoint();
    EXPECT_LE((m - rec).norm(), 1e-10 * std::max(1.0, m.norm()));
    EXPECT_LE((eg.eigenvectors.adjoint() * eg.eigenvectors - identity(5)).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(HermitianEigenDecomp, RejectsNonHermitian) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 1) = 1.0;
  EXPECT_THROW(hermitian_eigen(m), std::invalid_argument);
}

TEST(TraceNorm, KnownValues) {
  EXPECT_NEAR(trace_norm(psi_d(3)), 1.0, 1e-12);  // density matrix
  EXPECT_NEAR(trace_norm(unit_matrix(2, 2, 0, 0) - psi_d(2)), std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(trace_norm(ComplexMatrix::Zero(3, 3)), 0.0, 0.0);
}

TEST(TraceNorm, UnitaryInvariance) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    ComplexMatrix m = random_complex(4, 4, rng);
    ComplexMatrix u = random_unitary(4, rng), v = random_unitary(4, rng);
    EXPECT_NEAR(trace_norm(u * m * v), trace_norm(m), 1e-9);
  }
}

TEST(IsPsd, KnownCases) {
  EXPECT_TRUE(is_psd(identity(3) / 3.0, 1e-8));
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = -1e-3;
  EXPECT_FALSE(is_psd(m, 1e-8));
}

TEST(IsPsd, SigmaPrimeOfSaturatingConstruction) {
  // sigma' = I/d - sum_{m != n} |m><n| / ((d-1) d): eigenvalues {0, 1/(d-1)}
  for (int d = 2; d <= 6; ++d) {
    ComplexMatrix sp = ComplexMatrix::Constant(d, d, Complex(-1.0 / ((d - 1.0) * d)));
    for (int i = 0; i < d; ++i) sp(i, i) = 1.0 / d;
    EXPECT_TRUE(is_psd(sp, 1e-9)) << "d=" << d;
    HermitianEigen eg = hermitian_eigen(sp);
    EXPECT_NEAR(eg.eigenvalues.minCoeff(), 0.0, 1e-12);
    EXPECT_NEAR(eg.eigenvalues.maxCoeff(), 1.0 / (d - 1.0), 1e-12);
  }
}

}  // namespace
}  // namespace cohdual
