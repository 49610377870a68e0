#include <cmath>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "ionsim/errors.hpp"
#include "ionsim/ion_model.hpp"
#include "oracles.hpp"

using namespace ionsim;

namespace {

SimParams reference_params(int cutoff) {
  SimParams p;
  p.lambda1 = 1.0;
  p.lambda2 = 0.01;
  p.eta = 0.202;
  p.epsilon = 0.01;
  p.fock_cutoff = cutoff;
  return p;
}

// L_n^k(x) = sum_j (-1)^j C(n+k, n-j) x^j / j!
double laguerre_sum(int n, int k, double x) {
  double s = 0.0;
  for (int j = 0; j <= n; ++j) {
    double c = 1.0;
    for (int i = 1; i <= n - j; ++i) c *= static_cast<double>(k + j + i) / i;  // C(n+k, n-j)
    double xf = 1.0;
    for (int i = 1; i <= j; ++i) xf *= x / i;
    s += ((j % 2) ? -1.0 : 1.0) * c * xf;
  }
  return s;
}

}  // namespace

TEST(Laguerre, ReferenceValues) {
  EXPECT_EQ(laguerre(0, 3, 1.7), 1.0);
  EXPECT_DOUBLE_EQ(laguerre(1, 2, 0.5), 2.5);
  EXPECT_NEAR(laguerre(2, 0, 1.0), -0.5, 1e-15);  // 1 - 2x + x^2/2
}

TEST(Laguerre, RecurrenceMatchesExplicitSum) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> ni(0, 25), ki(0, 4);
  std::uniform_real_distribution<double> xs(0.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = ni(rng), k = ki(rng);
    const double x = xs(rng);
    const double ref = laguerre_sum(n, k, x);
    EXPECT_NEAR(laguerre(n, k, x), ref, 1e-9 * std::max(1.0, std::abs(ref))) << n << " " << k << " " << x;
  }
}

TEST(ModeStrength, ReferenceValues) {
  SimParams p;
  p.fock_cutoff = 10;
  p.eta = 0.0;
  p.epsilon = 1.0;
  EXPECT_DOUBLE_EQ(mode_strength(0, 0, p), -0.5);

  p.eta = 0.202;
  p.epsilon = 0.01;
  EXPECT_NEAR(mode_strength(0, 1, p), -0.0048990, 5e-8);

  p.epsilon = 1.0;
  const double eta2 = 0.202 * 0.202;
  const double closed = -0.5 * (1.0 - eta2) * std::exp(-eta2 / 2.0);  // -0.469912380...
  EXPECT_NEAR(mode_strength(1, 0, p), closed, 1e-14);
  EXPECT_NEAR(mode_strength(1, 0, p), -0.46991238, 1e-8);
}

TEST(ModeStrength, StandardMatrixElementForm) {
  SimParams p;
  p.fock_cutoff = 10;
  p.eta = 0.3;
  p.epsilon = 0.2;
  const double env = -0.1 * std::exp(-0.045);
  // n = 2, k = 2: n!/(n+k)! = 2/24
  const double l = laguerre_sum(2, 2, 0.09);
  EXPECT_NEAR(mode_strength(2, 2, p), env * (2.0 / 24.0) * l, 1e-15);
  p.standard_matrix_element = true;
  EXPECT_NEAR(mode_strength(2, 2, p), env * std::sqrt(2.0 / 24.0) * 0.09 * l, 1e-15);
  // k = 0 is identical in both conventions
  const double with_flag = mode_strength(3, 0, p);
  p.standard_matrix_element = false;
  EXPECT_DOUBLE_EQ(mode_strength(3, 0, p), with_flag);
}

TEST(ModeStrength, CutoffGuard) {
  SimParams p;
  p.fock_cutoff = 4;
  EXPECT_THROW(mode_strength(3, 2, p), CutoffError);
  EXPECT_NO_THROW(mode_strength(2, 2, p));
}

TEST(BlockBasis, NineStateOrder) {
  const auto b = block_basis(3, 10);
  ASSERT_EQ(b.dim(), 9);
  const std::vector<BasisState> expected{
      {3, Level::a, Level::a}, {4, Level::a, Level::b}, {4, Level::a, Level::c},
      {4, Level::b, Level::a}, {5, Level::b, Level::b}, {5, Level::b, Level::c},
      {4, Level::c, Level::a}, {5, Level::c, Level::b}, {5, Level::c, Level::c}};
  EXPECT_EQ(b.states, expected);
}

TEST(BlockBasis, EdgeBlocks) {
  const auto m1 = block_basis(-1, 10);
  EXPECT_EQ(m1.dim(), 8);
  for (const auto& s : m1.states) EXPECT_GE(s.fock, 0);
  EXPECT_FALSE(m1.states.front() == (BasisState{-1, Level::a, Level::a}));

  const auto m2 = block_basis(-2, 10);
  const std::vector<BasisState> expected{{0, Level::b, Level::b}, {0, Level::b, Level::c},
                                         {0, Level::c, Level::b}, {0, Level::c, Level::c}};
  EXPECT_EQ(m2.states, expected);
}

TEST(BuildBlock, VacuumBlockIsZero) {
  const auto blk = build_block(-2, reference_params(6));
  EXPECT_EQ(blk.basis.dim(), 4);
  EXPECT_EQ(oracle::max_abs(blk.coupling), 0.0);
}

TEST(BuildBlock, LambdaTwoZeroDecouplesLevelC) {
  SimParams p = reference_params(8);
  p.lambda2 = 0.0;
  const auto blk = build_block(2, p);
  const std::vector<int> ab_sector{0, 1, 3, 4};     // aa, ab, ba, bb
  const std::vector<int> c_sector{2, 5, 6, 7, 8};   // ac, bc, ca, cb, cc
  for (int i : ab_sector)
    for (int j : c_sector) {
      EXPECT_EQ(blk.coupling(i, j), Complex(0.0, 0.0));
      EXPECT_EQ(blk.coupling(j, i), Complex(0.0, 0.0));
    }
  // and the ab sector does couple
  EXPECT_NE(blk.coupling(1, 0), Complex(0.0, 0.0));
}

TEST(BuildBlock, MatchesBruteForceMatrixElements) {
  const SimParams p = reference_params(12);
  const CMatrix h = oracle::brute_force_hamiltonian(p);
  for (int n : {-2, -1, 0, 4, 10}) {
    const auto blk = build_block(n, p);
    EXPECT_LE(max_hermitian_defect(blk.coupling), 1e-12);
    for (int j = 0; j < blk.basis.dim(); ++j)
      for (int k = 0; k < blk.basis.dim(); ++k) {
        const Complex expected = h(full_index(blk.basis.states[j], 12), full_index(blk.basis.states[k], 12));
        EXPECT_LE(std::abs(blk.coupling(j, k) - expected), 1e-12) << "block " << n << " (" << j << "," << k << ")";
      }
  }
}

TEST(BuildBlock, CutoffViolation) {
  const SimParams p = reference_params(5);
  EXPECT_THROW(build_block(4, p), CutoffError);
  EXPECT_THROW(build_block(-3, p), CutoffError);
  EXPECT_NO_THROW(build_block(3, p));
}

TEST(BuildBlock, ComplexCouplingsStayHermitian) {
  SimParams p = reference_params(6);
  p.lambda1 = Complex(0.6, 0.8);
  p.lambda2 = Complex(-0.2, 0.3);
  p.epsilon = 1.0;
  const auto blk = build_block(1, p);
  EXPECT_LE(max_hermitian_defect(blk.coupling), 1e-15);
  EXPECT_LE(oracle::max_abs(blk.spectrum.reconstruct() - blk.coupling), 1e-12);
}

TEST(FullHamiltonian, ZeroCouplings) {
  SimParams p = reference_params(5);
  p.lambda1 = 0.0;
  p.lambda2 = 0.0;
  EXPECT_EQ(oracle::max_abs(build_full_hamiltonian(p)), 0.0);
}

TEST(FullHamiltonian, HermitianAndMatchesBlocksAndBruteForce) {
  SimParams p = reference_params(12);
  p.lambda2 = Complex(0.3, -0.1);
  p.epsilon = 0.7;
  const CMatrix h = build_full_hamiltonian(p);
  EXPECT_LE(max_hermitian_defect(h), 1e-14);
  const BlockSystem sys(p);
  EXPECT_LE(oracle::max_abs(sys.direct_sum() - h), 1e-12);
  EXPECT_LE(oracle::max_abs(oracle::brute_force_hamiltonian(p) - h), 1e-12);
}

TEST(FullHamiltonian, ExcitationConservation) {
  const SimParams p = reference_params(10);
  const CMatrix h = build_full_hamiltonian(p);
  for (Index i = 0; i < h.rows(); ++i)
    for (Index j = 0; j < h.cols(); ++j) {
      if (block_index_of(basis_state(i, 10)) != block_index_of(basis_state(j, 10))) {
        EXPECT_EQ(h(i, j), Complex(0.0, 0.0));
      }
    }
}

TEST(BlockSystem, PartitionCoversEveryStateOnce) {
  for (int cutoff : {2, 3, 7}) {
    SimParams p = reference_params(cutoff);
    const BlockSystem sys(p);
    std::multiset<Index> seen;
    for (const auto& blk : sys.blocks())
      for (const auto& s : blk.basis.states) {
        EXPECT_LE(s.fock, cutoff);
        seen.insert(full_index(s, cutoff));
      }
    EXPECT_EQ(static_cast<Index>(seen.size()), sys.layout().total_dim());
    for (Index i = 0; i < sys.layout().total_dim(); ++i) EXPECT_EQ(seen.count(i), 1u);
  }
}

TEST(BlockSystem, ScatterGatherRoundTrip) {
  std::mt19937_64 rng(17);
  const BlockSystem sys(reference_params(6));
  const auto psi = oracle::random_pure(sys.layout(), rng);
  EXPECT_EQ(sys.gather(sys.scatter(psi.amplitudes())), psi.amplitudes());
  for (Index i = 0; i < sys.layout().total_dim(); ++i) {
    const auto [n, j] = sys.locate(i);
    EXPECT_EQ(sys.full_index(n, j), i);
  }
}

TEST(BlockSystem, SpectraSymmetricForRealCouplings) {
  SimParams p = reference_params(14);
  p.epsilon = 1.0;
  p.lambda2 = 0.4;
  const BlockSystem sys(p);
  for (const auto& blk : sys.blocks()) {
    if (blk.basis.block_index < 0) continue;
    const RVector& e = blk.spectrum.eigenvalues;
    for (Index i = 0; i < e.size(); ++i) EXPECT_NEAR(e(i), -e(e.size() - 1 - i), 1e-10);
  }
}
