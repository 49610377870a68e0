#include "ionsim/dynamics.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ionsim/errors.hpp"

namespace ionsim {

namespace {

constexpr double kTruncatedWeight = 1e-24;
const Complex kI{0.0, 1.0};

void require_constant_coupling(const Modulation& modulation) {
  if (is_time_dependent(modulation)) {
    throw UnsupportedRegime(
        "intrinsic decoherence is only solved for a time-independent coupling; "
        "modulation '" +
        describe(modulation) + "' is refused (use constant modulation or gamma = 0)");
  }
}

void require_ion_layout(const PureState& psi, const BlockSystem& system) {
  if (!(psi.layout() == system.layout())) {
    throw std::invalid_argument("state layout does not match the ion/field layout of the model");
  }
}

std::vector<CVector> project_onto_eigenbases(const BlockSystem& system, const PureState& psi) {
  require_ion_layout(psi, system);
  auto per_block = system.scatter(psi.amplitudes());
  for (std::size_t b = 0; b < per_block.size(); ++b) {
    const auto& blk = system.blocks()[b];
    if (!system.is_complete(blk.basis.block_index) &&
        per_block[b].squaredNorm() > kTruncatedWeight) {
      std::ostringstream os;
      os << "initial state has weight in block " << blk.basis.block_index
         << ", which needs Fock states above N_max = " << system.fock_cutoff();
      throw CutoffError(os.str());
    }
    per_block[b] = (blk.spectrum.eigenvectors.adjoint() * per_block[b]).eval();
  }
  return per_block;
}

// exp(-i dE t) exp(-gamma t dE^2 / 2)
Complex milburn_factor(double de, double gamma, double t) {
  return std::exp(Complex(-0.5 * gamma * t * de * de, -de * t));
}

void require_decoherence_args(double gamma, double t) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("gamma must be >= 0");
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("time must be >= 0");
}

CMatrix hermitian_part(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

void require_support_within_cutoff(const PureState& psi, int fock_cutoff) {
  const CVector& a = psi.amplitudes();
  for (Index i = 0; i < a.size(); ++i) {
    if (std::norm(a(i)) <= kTruncatedWeight) continue;
    const BasisState s = basis_state(i, fock_cutoff);
    if (block_index_of(s) + 2 > fock_cutoff) {
      std::ostringstream os;
      os << "initial state has weight on |" << s.fock << ";" << level_name(s.ion1)
         << level_name(s.ion2) << ">, whose block exceeds N_max = " << fock_cutoff;
      throw CutoffError(os.str());
    }
  }
}

}  // namespace

void validate_time_grid(std::span<const double> times) {
  if (times.empty()) throw std::invalid_argument("time grid is empty");
  if (times.front() != 0.0) throw std::invalid_argument("time grid must start at 0");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw std::invalid_argument("time grid must be strictly increasing");
  }
}

BlockPropagator::BlockPropagator(std::shared_ptr<const BlockSystem> system, const PureState& psi0)
    : system_(std::move(system)), eigen_coeffs_(project_onto_eigenbases(*system_, psi0)) {}

CVector BlockPropagator::amplitudes_at(double phase) const {
  const auto& blocks = system_->blocks();
  CVector full = CVector::Zero(system_->layout().total_dim());
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& spec = blocks[b].spectrum;
    const CVector& c = eigen_coeffs_[b];
    if (c.size() == 0) continue;
    CVector rotated(c.size());
    for (Index m = 0; m < c.size(); ++m) {
      rotated(m) = c(m) * std::exp(Complex(0.0, -spec.eigenvalues(m) * phase));
    }
    const CVector local = spec.eigenvectors * rotated;
    const int n = blocks[b].basis.block_index;
    for (Index j = 0; j < local.size(); ++j) full(system_->full_index(n, static_cast<int>(j))) = local(j);
  }
  return full;
}

PureState BlockPropagator::state_at(double phase) const {
  return PureState::normalized(system_->layout(), amplitudes_at(phase));
}

PureEvolution evolve_pure(const PureState& psi0, std::shared_ptr<const BlockSystem> system,
                          const Modulation& modulation, std::span<const double> times) {
  validate_time_grid(times);
  validate(modulation);
  const BlockPropagator prop(std::move(system), psi0);
  PureEvolution out;
  out.method.kind = EvolutionMethod::Kind::block_eigen;
  out.times.assign(times.begin(), times.end());
  out.states.reserve(times.size());
  for (double t : times) {
    // Unitary evolution: the norm is conserved up to round-off, so the
    // constructor check (1e-10) is the conservation test.
    out.states.emplace_back(prop.system().layout(), prop.amplitudes_at(modulation_integral(modulation, t)));
  }
  return out;
}

PureEvolution evolve_pure(const PureState& psi0, const SimParams& params,
                          std::span<const double> times) {
  params.validate();
  return evolve_pure(psi0, std::make_shared<const BlockSystem>(params), params.modulation, times);
}

PureState propagate_phase(const PureState& psi, const BlockSystem& system, double phase) {
  const auto coeffs = project_onto_eigenbases(system, psi);
  std::vector<CVector> local(coeffs.size());
  for (std::size_t b = 0; b < coeffs.size(); ++b) {
    const auto& spec = system.blocks()[b].spectrum;
    CVector rotated = coeffs[b];
    for (Index m = 0; m < rotated.size(); ++m) {
      rotated(m) *= std::exp(Complex(0.0, -spec.eigenvalues(m) * phase));
    }
    local[b] = spec.eigenvectors * rotated;
  }
  return PureState(system.layout(), system.gather(local));
}

PureEvolution evolve_pure_dense(const PureState& psi0, const SimParams& params,
                                std::span<const double> times) {
  params.validate();
  validate_time_grid(times);
  if (!(psi0.layout() == ion_layout(params.fock_cutoff))) {
    throw std::invalid_argument("state layout does not match the ion/field layout of the model");
  }
  require_support_within_cutoff(psi0, params.fock_cutoff);

  const Spectrum spec = hermitian_spectrum(build_full_hamiltonian(params));
  const CVector coeffs = spec.eigenvectors.adjoint() * psi0.amplitudes();
  PureEvolution out;
  out.method.kind = EvolutionMethod::Kind::dense_oracle;
  out.times.assign(times.begin(), times.end());
  out.states.reserve(times.size());
  for (double t : times) {
    const double phase = modulation_integral(params.modulation, t);
    CVector rotated(coeffs.size());
    for (Index m = 0; m < coeffs.size(); ++m) {
      rotated(m) = coeffs(m) * std::exp(Complex(0.0, -spec.eigenvalues(m) * phase));
    }
    out.states.emplace_back(psi0.layout(), spec.eigenvectors * rotated);
  }
  return out;
}

DensityMatrix milburn_closed_form(const DensityMatrix& rho0, const CMatrix& hamiltonian,
                                  double gamma, double t, const Modulation& modulation) {
  require_constant_coupling(modulation);
  require_decoherence_args(gamma, t);
  if (hamiltonian.rows() != rho0.dim()) throw std::invalid_argument("Hamiltonian size mismatch");

  const Spectrum spec = hermitian_spectrum(hamiltonian);
  const CMatrix& v = spec.eigenvectors;
  CMatrix x = v.adjoint() * rho0.matrix() * v;
  for (Index n = 0; n < x.cols(); ++n) {
    for (Index m = 0; m < x.rows(); ++m) {
      x(m, n) *= milburn_factor(spec.eigenvalues(m) - spec.eigenvalues(n), gamma, t);
    }
  }
  return DensityMatrix(rho0.layout(), hermitian_part(v * x * v.adjoint()));
}

namespace {

struct KrausAccumulator {
  CMatrix hamiltonian;
  CMatrix current;     // M_k
  CMatrix state_sum;   // sum M_k rho M_k^dag
  CMatrix completeness;  // sum M_k M_k^dag
  const CMatrix* rho0;
  double gamma_t;
  int terms = 0;

  KrausAccumulator(const DensityMatrix& rho, const CMatrix& h, double gamma, double t)
      : hamiltonian(h), rho0(&rho.matrix()), gamma_t(gamma * t) {
    const Spectrum spec = hermitian_spectrum(h);
    RVector e = spec.eigenvalues;
    CVector diag(e.size());
    for (Index i = 0; i < e.size(); ++i) diag(i) = std::exp(Complex(-0.5 * gamma_t * e(i) * e(i), -e(i) * t));
    current = spec.eigenvectors * diag.asDiagonal() * spec.eigenvectors.adjoint();
    state_sum = CMatrix::Zero(h.rows(), h.cols());
    completeness = CMatrix::Zero(h.rows(), h.cols());
  }

  void add_term() {
    if (terms > 0) {
      // M_k = sqrt(gamma t / k) H M_{k-1}
      current = (std::sqrt(gamma_t / terms) * (hamiltonian * current)).eval();
    }
    state_sum += current * (*rho0) * current.adjoint();
    completeness += current * current.adjoint();
    ++terms;
  }

  double deficit() const {
    return (completeness - CMatrix::Identity(completeness.rows(), completeness.cols()))
        .cwiseAbs()
        .maxCoeff();
  }
};

KrausResult finish(const KrausAccumulator& acc) {
  return KrausResult{hermitian_part(acc.state_sum), acc.terms, acc.deficit()};
}

}  // namespace

KrausResult milburn_kraus(const DensityMatrix& rho0, const CMatrix& hamiltonian, double gamma,
                          double t, int terms) {
  require_decoherence_args(gamma, t);
  if (terms < 1) throw std::invalid_argument("Kraus sum needs at least one term");
  if (hamiltonian.rows() != rho0.dim()) throw std::invalid_argument("Hamiltonian size mismatch");
  KrausAccumulator acc(rho0, hamiltonian, gamma, t);
  for (int k = 0; k < terms; ++k) acc.add_term();
  return finish(acc);
}

KrausResult milburn_kraus_adaptive(const DensityMatrix& rho0, const CMatrix& hamiltonian,
                                   double gamma, double t, double target, int max_terms) {
  require_decoherence_args(gamma, t);
  if (!(target > 0.0)) throw std::invalid_argument("completeness target must be > 0");
  if (max_terms < 1) throw std::invalid_argument("Kraus sum needs at least one term");
  if (hamiltonian.rows() != rho0.dim()) throw std::invalid_argument("Hamiltonian size mismatch");
  KrausAccumulator acc(rho0, hamiltonian, gamma, t);
  do {
    acc.add_term();
  } while (acc.terms < max_terms && acc.deficit() > target);
  return finish(acc);
}

BlockMilburnEvolver::BlockMilburnEvolver(std::shared_ptr<const BlockSystem> system,
                                         const PureState& psi0, double gamma,
                                         const Modulation& modulation)
    : system_(std::move(system)), gamma_(gamma) {
  require_constant_coupling(modulation);
  require_decoherence_args(gamma, 0.0);
  eigen_coeffs_ = project_onto_eigenbases(*system_, psi0);
}

CMatrix BlockMilburnEvolver::block_pair(std::size_t b, std::size_t c, double t) const {
  const auto& sb = system_->blocks()[b].spectrum;
  const auto& sc = system_->blocks()[c].spectrum;
  const CVector& cb = eigen_coeffs_[b];
  const CVector& cc = eigen_coeffs_[c];
  CMatrix w(cb.size(), cc.size());
  for (Index n = 0; n < cc.size(); ++n) {
    for (Index m = 0; m < cb.size(); ++m) {
      w(m, n) = cb(m) * std::conj(cc(n)) *
                milburn_factor(sb.eigenvalues(m) - sc.eigenvalues(n), gamma_, t);
    }
  }
  return sb.eigenvectors * w * sc.eigenvectors.adjoint();
}

DensityMatrix BlockMilburnEvolver::state(double t) const {
  require_decoherence_args(gamma_, t);
  const auto& blocks = system_->blocks();
  const Index dim = system_->layout().total_dim();
  CMatrix rho = CMatrix::Zero(dim, dim);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (eigen_coeffs_[b].size() == 0 || eigen_coeffs_[b].squaredNorm() == 0.0) continue;
    for (std::size_t c = 0; c < blocks.size(); ++c) {
      if (eigen_coeffs_[c].size() == 0 || eigen_coeffs_[c].squaredNorm() == 0.0) continue;
      const CMatrix y = block_pair(b, c, t);
      const int nb = blocks[b].basis.block_index;
      const int nc = blocks[c].basis.block_index;
      for (Index k = 0; k < y.cols(); ++k) {
        const Index col = system_->full_index(nc, static_cast<int>(k));
        for (Index j = 0; j < y.rows(); ++j) rho(system_->full_index(nb, static_cast<int>(j)), col) = y(j, k);
      }
    }
  }
  return DensityMatrix(system_->layout(), hermitian_part(rho));
}

DensityMatrix BlockMilburnEvolver::ion_state(double t) const {
  require_decoherence_args(gamma_, t);
  const auto& blocks = system_->blocks();
  constexpr Index kIonDim = kLevels * kLevels;
  CMatrix rho = CMatrix::Zero(kIonDim, kIonDim);
  auto ion_index = [](const BasisState& s) {
    return static_cast<Index>(s.ion1) * kLevels + static_cast<Index>(s.ion2);
  };
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (eigen_coeffs_[b].size() == 0 || eigen_coeffs_[b].squaredNorm() == 0.0) continue;
    // Equal Fock numbers require block indices within two of each other.
    const std::size_t lo = b >= 2 ? b - 2 : 0;
    const std::size_t hi = std::min(blocks.size() - 1, b + 2);
    for (std::size_t c = lo; c <= hi; ++c) {
      if (eigen_coeffs_[c].size() == 0 || eigen_coeffs_[c].squaredNorm() == 0.0) continue;
      const CMatrix y = block_pair(b, c, t);
      const auto& sb = blocks[b].basis.states;
      const auto& sc = blocks[c].basis.states;
      for (Index j = 0; j < y.rows(); ++j) {
        for (Index k = 0; k < y.cols(); ++k) {
          if (sb[j].fock == sc[k].fock) rho(ion_index(sb[j]), ion_index(sc[k])) += y(j, k);
        }
      }
    }
  }
  HilbertLayout ions({{std::string(kIon1), kLevels}, {std::string(kIon2), kLevels}});
  return DensityMatrix(std::move(ions), hermitian_part(rho));
}

}  // namespace ionsim
