#include "ionsim/ion_model.hpp"

#include <atomic>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <unsupported/Eigen/KroneckerProduct>

#include "ionsim/errors.hpp"

namespace ionsim {

namespace {

#ifdef IONSIM_MUTATION_HOOKS
std::atomic<double> g_mode_strength_offset{0.0};
#endif

constexpr std::array<Level, kLevels> kAllLevels{Level::a, Level::b, Level::c};

Complex coupling_rate(Level upper, const SimParams& p) {
  return upper == Level::b ? p.lambda1 : p.lambda2;
}

// <row| H_int(zeta = 1) |col> for two basis states of the truncated space.
Complex interaction_element(const BasisState& row, const BasisState& col, const SimParams& p) {
  const bool ion1_same = row.ion1 == col.ion1;
  const bool ion2_same = row.ion2 == col.ion2;
  if (ion1_same == ion2_same) return {0.0, 0.0};  // exactly one ion must flip
  const Level from = ion1_same ? col.ion2 : col.ion1;
  const Level to = ion1_same ? row.ion2 : row.ion1;

  if (from == Level::a && to != Level::a && row.fock == col.fock + 1) {
    // raising with phonon creation
    const int m1 = col.fock + 1;
    return coupling_rate(to, p) * std::sqrt(static_cast<double>(m1)) * mode_strength(m1, 0, p);
  }
  if (to == Level::a && from != Level::a && row.fock == col.fock - 1) {
    const int m = col.fock;
    return std::conj(coupling_rate(from, p)) * std::sqrt(static_cast<double>(m)) *
           mode_strength(m, 0, p);
  }
  return {0.0, 0.0};
}

BlockMatrix assemble_block(int n, const SimParams& p) {
  BlockMatrix out;
  out.basis = block_basis(n, p.fock_cutoff);
  const int d = out.basis.dim();
  out.coupling = CMatrix::Zero(d, d);
  for (int j = 0; j < d; ++j) {
    for (int k = 0; k < d; ++k) {
      out.coupling(j, k) = interaction_element(out.basis.states[j], out.basis.states[k], p);
    }
  }
  out.spectrum = hermitian_spectrum(out.coupling);
  return out;
}

}  // namespace

char level_name(Level l) { return "abc"[static_cast<int>(l)]; }

void SimParams::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument(what); };
  if (!std::isfinite(eta) || eta < 0.0) fail("eta must be finite and >= 0");
  if (!std::isfinite(epsilon)) fail("epsilon must be finite");
  if (!std::isfinite(gamma) || gamma < 0.0) fail("gamma must be finite and >= 0");
  if (!std::isfinite(nbar) || nbar < 0.0) fail("nbar must be finite and >= 0");
  constexpr double two_pi = 2.0 * M_PI;
  if (!(theta >= 0.0 && theta <= two_pi + 1e-12)) fail("theta must lie in [0, 2 pi]");
  if (!(phi >= 0.0 && phi <= M_PI + 1e-12)) fail("phi must lie in [0, pi]");
  if (!std::isfinite(std::abs(lambda1)) || !std::isfinite(std::abs(lambda2))) {
    fail("couplings must be finite");
  }
  if (fock_cutoff < 2) fail("fock_cutoff must be >= 2");
  ionsim::validate(modulation);
}

HilbertLayout ion_layout(int fock_cutoff) {
  return HilbertLayout({{std::string(kIon1), kLevels},
                        {std::string(kIon2), kLevels},
                        {std::string(kField), fock_cutoff + 1}});
}

Index full_index(const BasisState& s, int fock_cutoff) {
  if (s.fock < 0 || s.fock > fock_cutoff) throw CutoffError("Fock number outside [0, N_max]");
  return (static_cast<Index>(s.ion1) * kLevels + static_cast<Index>(s.ion2)) * (fock_cutoff + 1) +
         s.fock;
}

BasisState basis_state(Index full, int fock_cutoff) {
  const Index nf = fock_cutoff + 1;
  BasisState s;
  s.fock = static_cast<int>(full % nf);
  const Index ions = full / nf;
  s.ion1 = static_cast<Level>(ions / kLevels);
  s.ion2 = static_cast<Level>(ions % kLevels);
  return s;
}

int block_index_of(const BasisState& s) {
  return s.fock - excitation(s.ion1) - excitation(s.ion2);
}

double laguerre(int n, int k, double x) {
  if (n < 0 || k < 0) throw std::invalid_argument("laguerre requires n, k >= 0");
  double prev = 1.0;
  if (n == 0) return prev;
  double cur = 1.0 + k - x;
  for (int j = 1; j < n; ++j) {
    const double next = ((2.0 * j + 1.0 + k - x) * cur - (j + k) * prev) / (j + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

double mode_strength(int n, int k, const SimParams& params) {
  if (n < 0 || k < 0) throw std::invalid_argument("mode_strength requires n, k >= 0");
  if (n + k > params.fock_cutoff) {
    std::ostringstream os;
    os << "mode_strength: n + k = " << n + k << " exceeds N_max = " << params.fock_cutoff;
    throw CutoffError(os.str());
  }
  // n!/(n+k)! = 1 / ((n+1)(n+2)...(n+k))
  double ratio = 1.0;
  for (int j = 1; j <= k; ++j) ratio /= static_cast<double>(n + j);

  const double eta2 = params.eta * params.eta;
  const double envelope = -0.5 * params.epsilon * laguerre(n, k, eta2) * std::exp(-0.5 * eta2);
  double value = params.standard_matrix_element
                     ? envelope * std::sqrt(ratio) * std::pow(params.eta, k)
                     : envelope * ratio;
#ifdef IONSIM_MUTATION_HOOKS
  value += g_mode_strength_offset.load(std::memory_order_relaxed);
#endif
  return value;
}

BlockBasis block_basis(int n, int fock_cutoff) {
  if (n < -2) throw CutoffError("block index must be >= -2");
  if (n > fock_cutoff) throw CutoffError("block index exceeds N_max");
  BlockBasis basis;
  basis.block_index = n;
  for (Level l1 : kAllLevels) {
    for (Level l2 : kAllLevels) {
      const int fock = n + excitation(l1) + excitation(l2);
      if (fock >= 0 && fock <= fock_cutoff) basis.states.push_back({fock, l1, l2});
    }
  }
  return basis;
}

BlockMatrix build_block(int n, const SimParams& params) {
  if (n < -2 || n + 2 > params.fock_cutoff) {
    std::ostringstream os;
    os << "build_block: block " << n << " needs Fock " << n + 2 << " but N_max = "
       << params.fock_cutoff;
    throw CutoffError(os.str());
  }
  return assemble_block(n, params);
}

CMatrix build_full_hamiltonian(const SimParams& params) {
  const int nf = params.fock_cutoff + 1;
  // a^dag truncated, then the diagonal mode function on the raised number
  CMatrix raise = CMatrix::Zero(nf, nf);
  for (int m = 0; m + 1 < nf; ++m) raise(m + 1, m) = std::sqrt(static_cast<double>(m + 1));
  CMatrix mode = CMatrix::Zero(nf, nf);
  for (int m = 0; m < nf; ++m) mode(m, m) = mode_strength(m, 0, params);
  const CMatrix field_up = mode * raise;

  const CMatrix id3 = CMatrix::Identity(kLevels, kLevels);
  CMatrix flip_ba = CMatrix::Zero(kLevels, kLevels);
  flip_ba(1, 0) = 1.0;
  CMatrix flip_ca = CMatrix::Zero(kLevels, kLevels);
  flip_ca(2, 0) = 1.0;

  const Index dim = static_cast<Index>(kLevels) * kLevels * nf;
  CMatrix up = CMatrix::Zero(dim, dim);
  const std::array<std::pair<const CMatrix*, Complex>, 2> transitions{
      std::pair{&flip_ba, params.lambda1}, std::pair{&flip_ca, params.lambda2}};
  for (const auto& [flip, rate] : transitions) {
    const CMatrix on_ion1 = Eigen::kroneckerProduct(*flip, id3).eval();
    const CMatrix on_ion2 = Eigen::kroneckerProduct(id3, *flip).eval();
    up += rate * Eigen::kroneckerProduct(on_ion1, field_up).eval();
    up += rate * Eigen::kroneckerProduct(on_ion2, field_up).eval();
  }
  return up + up.adjoint();
}

BlockSystem::BlockSystem(const SimParams& params)
    : fock_cutoff_(params.fock_cutoff), layout_(ion_layout(params.fock_cutoff)) {
  params.validate();
  const Index total = layout_.total_dim();
  locate_.assign(static_cast<std::size_t>(total), {0, -1});
  for (int n = -2; n <= fock_cutoff_; ++n) {
    blocks_.push_back(assemble_block(n, params));
    std::vector<Index> idx;
    const auto& states = blocks_.back().basis.states;
    for (int j = 0; j < static_cast<int>(states.size()); ++j) {
      const Index f = ionsim::full_index(states[j], fock_cutoff_);
      idx.push_back(f);
      locate_[f] = {n, j};
    }
    embed_.push_back(std::move(idx));
  }
}

const BlockMatrix& BlockSystem::block(int n) const {
  if (n < -2 || n > fock_cutoff_) throw CutoffError("block index out of range");
  return blocks_[static_cast<std::size_t>(n + 2)];
}

Index BlockSystem::full_index(int n, int j) const {
  return embed_.at(static_cast<std::size_t>(n + 2)).at(static_cast<std::size_t>(j));
}

std::pair<int, int> BlockSystem::locate(Index full) const {
  return locate_.at(static_cast<std::size_t>(full));
}

std::vector<CVector> BlockSystem::scatter(const CVector& full) const {
  if (full.size() != layout_.total_dim()) {
    throw std::invalid_argument("scatter: vector length does not match layout");
  }
  std::vector<CVector> out;
  out.reserve(blocks_.size());
  for (const auto& idx : embed_) {
    CVector v(static_cast<Index>(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j) v(static_cast<Index>(j)) = full(idx[j]);
    out.push_back(std::move(v));
  }
  return out;
}

CVector BlockSystem::gather(const std::vector<CVector>& per_block) const {
  if (per_block.size() != embed_.size()) throw std::invalid_argument("gather: block count mismatch");
  CVector full = CVector::Zero(layout_.total_dim());
  for (std::size_t b = 0; b < embed_.size(); ++b) {
    const auto& idx = embed_[b];
    if (per_block[b].size() != static_cast<Index>(idx.size())) {
      throw std::invalid_argument("gather: block dimension mismatch");
    }
    for (std::size_t j = 0; j < idx.size(); ++j) full(idx[j]) = per_block[b](static_cast<Index>(j));
  }
  return full;
}

CMatrix BlockSystem::direct_sum() const {
  CMatrix h = CMatrix::Zero(layout_.total_dim(), layout_.total_dim());
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const auto& idx = embed_[b];
    const CMatrix& c = blocks_[b].coupling;
    for (std::size_t j = 0; j < idx.size(); ++j) {
      for (std::size_t k = 0; k < idx.size(); ++k) {
        h(idx[j], idx[k]) = c(static_cast<Index>(j), static_cast<Index>(k));
      }
    }
  }
  return h;
}

#ifdef IONSIM_MUTATION_HOOKS
namespace testing {
ScopedModeStrengthMutation::ScopedModeStrengthMutation(double offset)
    : previous_(g_mode_strength_offset.exchange(offset)) {}
ScopedModeStrengthMutation::~ScopedModeStrengthMutation() {
  g_mode_strength_offset.store(previous_);
}
}  // namespace testing
#endif

}  // namespace ionsim
