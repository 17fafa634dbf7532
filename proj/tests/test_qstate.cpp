#include <gtest/gtest.h>

#include <random>

#include "echarge/charge.hpp"
#include "echarge/heisenberg_ring.hpp"
#include "echarge/qstate.hpp"
#include "oracle.hpp"

using namespace echarge;

namespace {

DensityOperator random_state(Dims dims, std::mt19937_64& rng, Eigen::Index rank = -1) {
  const auto d = static_cast<Eigen::Index>(dims_product(dims));
  return DensityOperator(oracle::random_density(d, rng, rank), std::move(dims));
}

}  // namespace

TEST(DensityOperator, RejectsInvalidMatrices) {
  CMatrix m = CMatrix::Identity(4, 4) / 4.0;
  EXPECT_THROW(DensityOperator(m, {2, 3}), Error);
  EXPECT_THROW(DensityOperator(2.0 * m, {2, 2}), Error);
  CMatrix nonherm = m;
  nonherm(0, 1) = 0.1;
  EXPECT_THROW(DensityOperator(nonherm, {2, 2}), Error);
  EXPECT_NO_THROW(DensityOperator(m, {2, 2}));
}

TEST(Ket, NormIsChecked) {
  CVector v = CVector::Ones(2);
  EXPECT_THROW(Ket(v, {2}), Error);
  EXPECT_NO_THROW(Ket::normalized(v, {2}));
  EXPECT_THROW(Ket::normalized(CVector::Zero(2), {2}), Error);
}

TEST(PartialTrace, MaximallyEntangledMarginalIsMixed) {
  const auto rho = DensityOperator::from_ket(bell_state(2));
  const auto ra = partial_trace(rho, {0});
  EXPECT_LT(max_abs(ra.matrix() - CMatrix::Identity(2, 2) / 2.0), 1e-15);
  EXPECT_EQ(ra.dims(), (Dims{2}));
}

TEST(PartialTrace, ProductStateFactorizes) {
  std::mt19937_64 rng(7);
  const auto a = random_state({2}, rng);
  const auto b = random_state({3}, rng);
  const auto ab = tensor_product(a, b);
  EXPECT_LT(max_abs(partial_trace(ab, {0}).matrix() - a.matrix()), 1e-14);
  EXPECT_LT(max_abs(partial_trace(ab, {1}).matrix() - b.matrix()), 1e-14);
}

TEST(PartialTrace, RingInfiniteTemperature) {
  const auto rho = gibbs_state(ring_hamiltonian(4), 0.0, qubit_dims(4));
  const auto r = partial_trace(rho, {2, 3});
  EXPECT_LT(max_abs(r.matrix() - CMatrix::Identity(4, 4) / 4.0), 1e-15);
}

TEST(PartialTrace, MatchesBruteForceAndPreservesOrder) {
  std::mt19937_64 rng(11);
  const Dims dims{2, 3, 2};
  const auto rho = random_state(dims, rng);
  for (std::vector<std::size_t> keep : {std::vector<std::size_t>{0}, {1}, {2}, {0, 2}, {1, 2}, {0, 1}}) {
    std::vector<bool> mask(3, false);
    for (auto k : keep) mask[k] = true;
    const auto expected = oracle::partial_trace(rho.matrix(), dims, mask);
    const auto got = partial_trace(rho, keep);
    EXPECT_LT(max_abs(got.matrix() - expected), 1e-14);
    Dims kept_dims;
    for (auto k : keep) kept_dims.push_back(dims[k]);
    EXPECT_EQ(got.dims(), kept_dims);
  }
  // Unsorted keep lists are normalized to the original order.
  EXPECT_LT(max_abs(partial_trace(rho, {2, 0}).matrix() - partial_trace(rho, {0, 2}).matrix()),
            1e-15);
}

TEST(PartialTrace, RejectsBadKeepSets) {
  const auto rho = DensityOperator::maximally_mixed({2, 2});
  EXPECT_THROW(partial_trace(rho, {}), Error);
  EXPECT_THROW(partial_trace(rho, {2}), Error);
  EXPECT_THROW(partial_trace(rho, {0, 1}), Error);
  EXPECT_THROW(partial_trace(rho, {0, 0}), Error);
}

TEST(Entropy, KnownValues) {
  EXPECT_DOUBLE_EQ(von_neumann_entropy(DensityOperator::maximally_mixed({2, 2})), 2.0);
  std::mt19937_64 rng(3);
  const Ket psi = Ket::normalized(oracle::random_complex(4, 1, rng).col(0), {2, 2});
  EXPECT_NEAR(von_neumann_entropy(DensityOperator::from_ket(psi)), 0.0, 1e-12);

  // Scalar evaluation of -sum p log2 p for these weights gives 1.52706.
  const auto rho = bell_diagonal_state({0.44040, 0.05960, 0.05960, 0.44040});
  EXPECT_NEAR(von_neumann_entropy(rho), 1.52706, 1e-4);
  EXPECT_NEAR(von_neumann_entropy(rho),
              oracle::entropy_bits({0.44040, 0.05960, 0.05960, 0.44040}), 1e-12);
}

TEST(Entropy, RejectsNegativeSpectrum) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = 1.1;
  m(1, 1) = -0.1;
  const DensityOperator rho(m, {2});
  EXPECT_THROW(von_neumann_entropy(rho), Error);
}

TEST(HermitianEig, IdentityIsOneGroup) {
  const auto eig = hermitian_eig(CMatrix::Identity(4, 4) / 4.0);
  ASSERT_EQ(eig.size(), 4u);
  for (double v : eig.eigenvalues) EXPECT_NEAR(v, 0.25, 1e-15);
  ASSERT_EQ(eig.degeneracy_groups.size(), 1u);
  EXPECT_EQ(eig.degeneracy_groups[0].size(), 4u);
}

TEST(HermitianEig, DiagonalGivesStandardBasis) {
  Eigen::Vector4cd d(0.1, 0.2, 0.3, 0.4);
  const auto eig = hermitian_eig(d.asDiagonal().toDenseMatrix());
  for (int k = 0; k < 4; ++k) {
    EXPECT_NEAR(eig.eigenvalues[static_cast<std::size_t>(k)], 0.1 * (k + 1), 1e-15);
    CVector e = CVector::Zero(4);
    e(k) = 1.0;
    EXPECT_LT((eig.vector(static_cast<std::size_t>(k)) - e).norm(), 1e-15);
  }
  EXPECT_FALSE(eig.has_degeneracy());
}

TEST(HermitianEig, XXThermalStateSpectrum) {
  // y = 1: scaled energies (0, 0, 2, -2).
  const double z = 2.0 + std::exp(-2.0) + std::exp(2.0);
  const std::array<double, 4> p{1 / z, 1 / z, std::exp(-2.0) / z, std::exp(2.0) / z};
  const auto eig = hermitian_eig(bell_diagonal_state(p).matrix());
  const std::array<double, 4> expect{0.01421, 0.10499, 0.10499, 0.77580};
  for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(eig.eigenvalues[k], expect[k], 1e-5);
  EXPECT_EQ(eig.degeneracy_groups.size(), 3u);
}

TEST(HermitianEig, PhaseFixedAndDeterministic) {
  std::mt19937_64 rng(5);
  const CMatrix h = oracle::random_hermitian(6, rng);
  const auto a = hermitian_eig(h);
  const auto b = hermitian_eig(h);
  EXPECT_EQ(a.eigenvectors, b.eigenvectors);
  for (std::size_t k = 0; k < a.size(); ++k) {
    const CVector v = a.vector(k);
    Eigen::Index first = 0;
    while (std::abs(v(first)) < 1e-12) ++first;
    EXPECT_GT(v(first).real(), 0.0);
    EXPECT_EQ(v(first).imag(), 0.0);
  }
}

TEST(HermitianEig, RejectsNonHermitian) {
  CMatrix m = CMatrix::Identity(2, 2);
  m(0, 1) = 1.0;
  EXPECT_THROW(hermitian_eig(m), Error);
}

TEST(HermitianEig, ReconstructionOnRandomMatrices) {
  std::mt19937_64 rng(17);
  for (Eigen::Index d : {1, 2, 3, 4, 7, 16, 64, 256, 1024}) {
    const CMatrix h = oracle::random_hermitian(d, rng);
    const auto eig = hermitian_eig(h);
    EXPECT_LT(max_abs(eig.reconstruct() - h), 1e-9) << "dim " << d;
    const CMatrix gram = eig.eigenvectors.adjoint() * eig.eigenvectors;
    EXPECT_LT(max_abs(gram - CMatrix::Identity(d, d)), 1e-9) << "dim " << d;
    for (std::size_t k = 1; k < eig.size(); ++k) {
      EXPECT_LE(eig.eigenvalues[k - 1], eig.eigenvalues[k] + 1e-9);
    }
  }
}

TEST(Gibbs, Probabilities) {
  const auto u = gibbs_probabilities(std::vector<double>{3.0, 3.0, 3.0});
  for (double v : u) EXPECT_NEAR(v, 1.0 / 3.0, 1e-15);

  const auto ising = gibbs_probabilities(std::vector<double>{-1, 1, 1, -1});
  const std::array<double, 4> expect{0.44040, 0.05960, 0.05960, 0.44040};
  for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(ising[j], expect[j], 1e-5);

  const auto xx = gibbs_probabilities(std::vector<double>{0, 0, 2, -2});
  EXPECT_NEAR(xx[3], 0.77580, 1e-5);

  const auto huge = gibbs_probabilities(std::vector<double>{-1e5, 0.0, 1e5});
  EXPECT_NEAR(huge[0], 1.0, 1e-15);

  EXPECT_THROW(gibbs_probabilities(std::vector<double>{0.0, NAN}), Error);
  EXPECT_THROW(gibbs_probabilities(std::vector<double>{INFINITY}), Error);
}

TEST(Gibbs, ShiftInvarianceAndNormalization) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-30.0, 30.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> e(6);
    for (auto& v : e) v = u(rng);
    const auto p = gibbs_probabilities(e);
    double sum = 0.0;
    for (double v : p) sum += v;
    EXPECT_NEAR(sum, 1.0, 1e-14);
    const double c = u(rng);
    auto shifted = e;
    for (auto& v : shifted) v += c;
    const auto q = gibbs_probabilities(shifted);
    for (std::size_t k = 0; k < p.size(); ++k) EXPECT_NEAR(p[k], q[k], 1e-12);
  }
}

TEST(Gibbs, StateAtZeroBetaIsMaximallyMixed) {
  const auto rho = gibbs_state(ring_hamiltonian(3), 0.0, qubit_dims(3));
  EXPECT_LT(max_abs(rho.matrix() - CMatrix::Identity(8, 8) / 8.0), 1e-15);
}

TEST(Gibbs, StateCommutesAndMatchesProbabilities) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 10; ++trial) {
    const CMatrix h = oracle::random_hermitian(8, rng);
    const double beta = 0.3 * trial;
    const auto rho = gibbs_state(h, beta, {2, 2, 2});
    EXPECT_LT(max_abs(rho.matrix() * h - h * rho.matrix()), 1e-9);

    Eigen::SelfAdjointEigenSolver<CMatrix> ref(h, Eigen::EigenvaluesOnly);
    std::vector<double> scaled(8);
    for (int k = 0; k < 8; ++k) scaled[static_cast<std::size_t>(k)] = beta * ref.eigenvalues()(k);
    auto expect = gibbs_probabilities(scaled);
    std::sort(expect.begin(), expect.end());
    auto got = hermitian_eig(rho.matrix()).eigenvalues;
    std::sort(got.begin(), got.end());
    for (std::size_t k = 0; k < 8; ++k) EXPECT_NEAR(got[k], expect[k], 1e-10);

    if (trial > 0) {
      EXPECT_LT(max_abs(rho.matrix() - oracle::gibbs_expm(h, beta)), 1e-10);
    }
  }
  EXPECT_THROW(gibbs_state(CMatrix::Identity(2, 2), -1.0), Error);
}

TEST(Gibbs, TwoQubitXYZIsBellDiagonal) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double j1 = u(rng), j2 = u(rng), j3 = u(rng), beta = std::abs(u(rng));
    CMatrix h = j1 * oracle::kron(oracle::pauli('x'), oracle::pauli('x')) +
                j2 * oracle::kron(oracle::pauli('y'), oracle::pauli('y')) +
                j3 * oracle::kron(oracle::pauli('z'), oracle::pauli('z'));
    const auto bell = to_bell_basis(gibbs_state(h, beta, {2, 2}));
    EXPECT_TRUE(bell.is_bell_diagonal);
    const std::vector<double> e{beta * (-j1 + j2 + j3), beta * (j1 - j2 + j3),
                                beta * (j1 + j2 - j3), beta * (-j1 - j2 - j3)};
    const auto p = gibbs_probabilities(e);
    for (int j = 0; j < 4; ++j) {
      EXPECT_NEAR(bell.matrix(j, j).real(), p[static_cast<std::size_t>(j)], 1e-12);
    }
  }
}

TEST(Gibbs, ThreeSiteRingLowTemperature) {
  // 3-site ring: H = 2(S_tot^2 - 9/4) in sigma units, levels -3 (x4) and +3 (x4).
  const CMatrix h = ring_hamiltonian(3);
  const auto eig = hermitian_eig(h);
  std::vector<double> scaled(eig.eigenvalues.begin(), eig.eigenvalues.end());
  for (double& e : scaled) e *= 50.0;
  const auto weights = gibbs_probabilities(scaled);
  for (std::size_t k = 0; k < eig.size(); ++k) {
    if (eig.eigenvalues[k] > 0) {
      EXPECT_LT(weights[k], 1e-40);
      EXPECT_GT(weights[k], 0.0);
    } else {
      EXPECT_NEAR(weights[k], 0.25, 1e-12);
    }
  }

  // The assembled matrix carries the same populations up to rounding.
  const auto rho = gibbs_state(h, 50.0, qubit_dims(3));
  for (std::size_t k = 0; k < eig.size(); ++k) {
    const CVector v = eig.vector(k);
    const double pop = (v.adjoint() * rho.matrix() * v)(0).real();
    EXPECT_NEAR(pop, eig.eigenvalues[k] > 0 ? 0.0 : 0.25, 1e-12);
  }
}

TEST(MutualInformation, KnownValues) {
  std::mt19937_64 rng(37);
  const auto prod = tensor_product(random_state({2}, rng), random_state({2}, rng));
  EXPECT_NEAR(mutual_information(prod), 0.0, 1e-12);
  EXPECT_NEAR(mutual_information(DensityOperator::from_ket(bell_state(2))), 2.0, 1e-12);
  EXPECT_NEAR(mutual_information(DensityOperator::maximally_mixed({2, 2})), 0.0, 1e-12);
}

TEST(Properties, RandomStatesRespectEntropyBounds) {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<int> rank_dist(1, 6);
  for (int trial = 0; trial < 300; ++trial) {
    const Dims dims = trial % 2 ? Dims{2, 3} : Dims{2, 2};
    const auto d = static_cast<Eigen::Index>(dims_product(dims));
    const auto rho = random_state(dims, rng, std::min<Eigen::Index>(rank_dist(rng), d));
    const double s = von_neumann_entropy(rho);
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, std::log2(static_cast<double>(d)) + 1e-12);

    const auto ra = partial_trace(rho, {0});
    EXPECT_NEAR(ra.matrix().trace().real(), 1.0, 1e-12);
    EXPECT_LT(hermiticity_residual(ra.matrix()), 1e-15);
    EXPECT_GE(mutual_information(rho), -1e-9);
  }
}
