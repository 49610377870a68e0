#pragma once

// Time evolution. The pure path propagates each excitation block with its
// cached eigendecomposition, A(n, t) = V exp(-i Z Theta(t)) V^dag A(n, 0),
// which is exact for any scalar modulation zeta(t) because the generator
// zeta(t) H commutes with itself at all times. The intrinsic-decoherence
// path solves  d rho/dt = -i[H, rho] - (gamma/2)[H, [H, rho]]  for constant
// coupling, either in closed form in the eigenbasis of H or as a truncated
// Kraus sum.
//
// All times are scaled times lambda1 * t.

#include <memory>
#include <span>
#include <vector>

#include "ionsim/ion_model.hpp"
#include "ionsim/modulation.hpp"
#include "ionsim/quantum_core.hpp"

namespace ionsim {

struct EvolutionMethod {
  enum class Kind { block_eigen, dense_oracle, milburn_closed, milburn_kraus };
  Kind kind = Kind::block_eigen;
  int kraus_terms = 0;  // only for milburn_kraus
};

template <class State>
struct EvolutionResult {
  std::vector<double> times;
  std::vector<State> states;
  EvolutionMethod method;
};

using PureEvolution = EvolutionResult<PureState>;
using MixedEvolution = EvolutionResult<DensityMatrix>;

// Throws std::invalid_argument unless times is nonempty, starts at 0 and is
// strictly increasing.
void validate_time_grid(std::span<const double> times);

// Initial state projected onto the eigenbases of every block; evaluates the
// state at any accumulated phase Theta.
class BlockPropagator {
 public:
  // Throws CutoffError if psi0 has weight in a truncated top block and
  // InvariantError if psi0 is not normalized.
  BlockPropagator(std::shared_ptr<const BlockSystem> system, const PureState& psi0);

  const BlockSystem& system() const { return *system_; }
  CVector amplitudes_at(double phase) const;
  PureState state_at(double phase) const;

 private:
  std::shared_ptr<const BlockSystem> system_;
  std::vector<CVector> eigen_coeffs_;  // V^dag A(n, 0) per block
};

PureEvolution evolve_pure(const PureState& psi0, const SimParams& params,
                          std::span<const double> times);
PureEvolution evolve_pure(const PureState& psi0, std::shared_ptr<const BlockSystem> system,
                          const Modulation& modulation, std::span<const double> times);

// Evolves by an accumulated phase Theta directly (restart helper).
PureState propagate_phase(const PureState& psi, const BlockSystem& system, double phase);

// Dense oracle: exp(-i H Theta(t)) on the full space from hermitian_spectrum
// of build_full_hamiltonian.
PureEvolution evolve_pure_dense(const PureState& psi0, const SimParams& params,
                                std::span<const double> times);

// rho_mn(t) = rho_mn(0) exp(-i (E_m - E_n) t) exp(-gamma t (E_m - E_n)^2 / 2)
// in the eigenbasis of H. Throws UnsupportedRegime for a time-dependent
// modulation and std::invalid_argument for gamma < 0 or t < 0.
DensityMatrix milburn_closed_form(const DensityMatrix& rho0, const CMatrix& hamiltonian,
                                  double gamma, double t,
                                  const Modulation& modulation = ConstantModulation{});

struct KrausResult {
  CMatrix state;  // trace short of 1 by at most the truncated tail
  int terms = 0;
  double completeness_deficit = 0.0;  // ||sum_{k<K} M_k M_k^dag - I||_max
};

// sum_{k<K} M_k rho0 M_k^dag with
// M_k = (gamma t)^{k/2} / sqrt(k!) H^k exp(-i H t) exp(-gamma t H^2 / 2).
KrausResult milburn_kraus(const DensityMatrix& rho0, const CMatrix& hamiltonian, double gamma,
                          double t, int terms);

// Smallest K with completeness deficit <= target, capped at max_terms.
KrausResult milburn_kraus_adaptive(const DensityMatrix& rho0, const CMatrix& hamiltonian,
                                   double gamma, double t, double target = 1e-10,
                                   int max_terms = 512);

// Closed-form intrinsic decoherence for a pure initial state, exploiting the
// block structure: eigenvectors of H are block-localized, so rho(t) is
// assembled from block pairs without dense D x D products.
class BlockMilburnEvolver {
 public:
  BlockMilburnEvolver(std::shared_ptr<const BlockSystem> system, const PureState& psi0,
                      double gamma, const Modulation& modulation = ConstantModulation{});

  DensityMatrix state(double t) const;
  // Field traced out: 9 x 9 state on ion1 (x) ion2.
  DensityMatrix ion_state(double t) const;

 private:
  CMatrix block_pair(std::size_t b, std::size_t c, double t) const;

  std::shared_ptr<const BlockSystem> system_;
  std::vector<CVector> eigen_coeffs_;
  double gamma_;
};

}  // namespace ionsim
