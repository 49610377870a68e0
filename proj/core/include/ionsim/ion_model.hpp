#pragma once

// Lamb-Dicke interaction Hamiltonian for two three-level ions sharing one
// vibrational mode, and its excitation-conserving block decomposition.
//
// Coupling convention (blue sideband): each ion is raised a->b with rate
// lambda1 and a->c with rate lambda2 while one phonon is created,
//
//   H = sum_i lambda1 E(a^dag a) |b><a|_i a^dag + lambda2 E(a^dag a) |c><a|_i a^dag + h.c.,
//
// with <m+1| E(a^dag a) a^dag |m> = sqrt(m+1) * mode_strength(m+1, 0).
// The excitation number  n = fock - [ion1 != a] - [ion2 != a]  is conserved,
// so H is a direct sum of blocks of dimension <= 9.

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "ionsim/modulation.hpp"
#include "ionsim/quantum_core.hpp"

namespace ionsim {

enum class Level : std::uint8_t { a = 0, b = 1, c = 2 };

inline constexpr int kLevels = 3;
inline constexpr std::string_view kIon1 = "ion1";
inline constexpr std::string_view kIon2 = "ion2";
inline constexpr std::string_view kField = "field";

char level_name(Level l);
// 0 for the ground level a, 1 for b and c.
constexpr int excitation(Level l) { return l == Level::a ? 0 : 1; }

struct SimParams {
  Complex lambda1{1.0, 0.0};  // sets the time unit, |lambda1| = 1
  Complex lambda2{0.01, 0.0};
  double eta = 0.202;     // Lamb-Dicke parameter
  double epsilon = 0.01;  // laser amplitude scale
  double gamma = 0.0;     // intrinsic decoherence rate
  double nbar = 5.0;      // mean phonon number of the initial coherent field
  double theta = 0.0;     // [0, 2 pi]
  double phi = 0.0;       // [0, pi]
  Modulation modulation = ConstantModulation{};
  int fock_cutoff = 0;    // N_max; must be >= 2
  bool standard_matrix_element = false;

  // Appear only in the pre-RWA Hamiltonian; carried for provenance.
  double nu = 0.0;
  double omega1 = 0.0;
  double omega2 = 0.0;

  // Throws std::invalid_argument on out-of-range values.
  void validate() const;
};

HilbertLayout ion_layout(int fock_cutoff);

struct BasisState {
  int fock = 0;
  Level ion1 = Level::a;
  Level ion2 = Level::a;

  bool operator==(const BasisState&) const = default;
};

Index full_index(const BasisState& s, int fock_cutoff);
BasisState basis_state(Index full, int fock_cutoff);
int block_index_of(const BasisState& s);

struct BlockBasis {
  int block_index = 0;
  std::vector<BasisState> states;

  int dim() const { return static_cast<int>(states.size()); }
};

struct BlockMatrix {
  BlockBasis basis;
  CMatrix coupling;  // <psi_j| H_int(zeta = 1) |psi_k>
  Spectrum spectrum;
};

// Associated Laguerre polynomial L_n^k(x), three-term recurrence.
double laguerre(int n, int k, double x);

// Diagonal element of the mode function E_k at Fock number n:
//   -(eps/2) (n!/(n+k)!) L_n^k(eta^2) exp(-eta^2/2)
// or, with standard_matrix_element,
//   -(eps/2) sqrt(n!/(n+k)!) eta^k L_n^k(eta^2) exp(-eta^2/2).
// Requires n + k <= fock_cutoff (CutoffError).
double mode_strength(int n, int k, const SimParams& params);

// Basis of excitation block n (n >= -2), with states whose Fock number is
// negative or exceeds fock_cutoff removed.
BlockBasis block_basis(int n, int fock_cutoff);

// Complete block n; requires -2 <= n and n + 2 <= fock_cutoff (CutoffError).
BlockMatrix build_block(int n, const SimParams& params);

// Dense H_int(zeta = 1) on ion1 (x) ion2 (x) field, assembled from Kronecker
// products of |l><m|, a^dag and the diagonal mode function. Terms whose a^dag
// would leave the truncated space are dropped.
CMatrix build_full_hamiltonian(const SimParams& params);

// Every excitation block of the truncated space, n = -2 .. fock_cutoff, with
// cached spectra. Blocks n > fock_cutoff - 2 are truncated at the top.
class BlockSystem {
 public:
  explicit BlockSystem(const SimParams& params);

  int fock_cutoff() const { return fock_cutoff_; }
  const HilbertLayout& layout() const { return layout_; }
  const std::vector<BlockMatrix>& blocks() const { return blocks_; }
  const BlockMatrix& block(int n) const;
  bool is_complete(int n) const { return n + 2 <= fock_cutoff_; }

  // Flat index of local state j of block n.
  Index full_index(int n, int j) const;
  // (block index, local position) of a flat index.
  std::pair<int, int> locate(Index full) const;

  std::vector<CVector> scatter(const CVector& full) const;
  CVector gather(const std::vector<CVector>& per_block) const;

  // Direct sum of all block couplings embedded in the full space.
  CMatrix direct_sum() const;

 private:
  int fock_cutoff_;
  HilbertLayout layout_;
  std::vector<BlockMatrix> blocks_;
  std::vector<std::vector<Index>> embed_;
  std::vector<std::pair<int, int>> locate_;
};

#ifdef IONSIM_MUTATION_HOOKS
namespace testing {
// Adds `offset` to every mode_strength value while alive. Negative control
// for the selftest; not thread-safe with concurrent simulations.
class ScopedModeStrengthMutation {
 public:
  explicit ScopedModeStrengthMutation(double offset);
  ~ScopedModeStrengthMutation();
  ScopedModeStrengthMutation(const ScopedModeStrengthMutation&) = delete;
  ScopedModeStrengthMutation& operator=(const ScopedModeStrengthMutation&) = delete;

 private:
  double previous_;
};
}  // namespace testing
#endif

}  // namespace ionsim
