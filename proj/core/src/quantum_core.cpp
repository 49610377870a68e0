#include "ionsim/quantum_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "ionsim/errors.hpp"

namespace ionsim {

HilbertLayout::HilbertLayout(std::vector<Factor> factors) : factors_(std::move(factors)) {
  LabelSet seen;
  for (const auto& f : factors_) {
    if (f.dim <= 0) {
      throw std::invalid_argument("factor '" + f.label + "' must have positive dimension");
    }
    if (!seen.insert(f.label).second) {
      throw std::invalid_argument("duplicate factor label '" + f.label + "'");
    }
    total_dim_ *= f.dim;
  }
}

bool HilbertLayout::contains(std::string_view label) const {
  return std::any_of(factors_.begin(), factors_.end(),
                     [&](const Factor& f) { return f.label == label; });
}

std::size_t HilbertLayout::position(std::string_view label) const {
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (factors_[i].label == label) return i;
  }
  throw std::invalid_argument("unknown factor label '" + std::string(label) + "'");
}

LabelSet HilbertLayout::labels() const {
  LabelSet out;
  for (const auto& f : factors_) out.insert(f.label);
  return out;
}

HilbertLayout HilbertLayout::restricted_to(const LabelSet& labels) const {
  for (const auto& l : labels) position(l);
  std::vector<Factor> kept;
  for (const auto& f : factors_) {
    if (labels.count(f.label)) kept.push_back(f);
  }
  return HilbertLayout(std::move(kept));
}

SubsystemSplit::SubsystemSplit(const HilbertLayout& layout, const LabelSet& kept)
    : kept_(layout.restricted_to(kept)) {
  std::vector<Factor> rest;
  for (const auto& f : layout.factors()) {
    if (!kept.count(f.label)) rest.push_back(f);
  }
  rest_ = HilbertLayout(std::move(rest));

  const Index total = layout.total_dim();
  table_.assign(static_cast<std::size_t>(total), 0);
  kept_of_.assign(static_cast<std::size_t>(total), 0);
  rest_of_.assign(static_cast<std::size_t>(total), 0);

  const auto& factors = layout.factors();
  std::vector<int> digits(factors.size(), 0);
  for (Index flat = 0; flat < total; ++flat) {
    Index k = 0;
    Index r = 0;
    for (std::size_t f = 0; f < factors.size(); ++f) {
      if (kept.count(factors[f].label)) {
        k = k * factors[f].dim + digits[f];
      } else {
        r = r * factors[f].dim + digits[f];
      }
    }
    kept_of_[flat] = k;
    rest_of_[flat] = r;
    table_[k * rest_.total_dim() + r] = flat;

    // increment the row-major odometer
    for (std::size_t f = factors.size(); f-- > 0;) {
      if (++digits[f] < factors[f].dim) break;
      digits[f] = 0;
    }
  }
}

PureState::PureState(HilbertLayout layout, CVector amplitudes)
    : layout_(std::move(layout)), amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != layout_.total_dim()) {
    throw std::invalid_argument("amplitude vector length does not match layout dimension");
  }
  const double n2 = amplitudes_.squaredNorm();
  if (!(std::abs(n2 - 1.0) <= tolerance::kNorm)) {
    std::ostringstream os;
    os << "pure state is not normalized (|psi|^2 = " << n2 << ")";
    throw InvariantError(os.str());
  }
}

PureState PureState::normalized(HilbertLayout layout, CVector amplitudes) {
  const double n = amplitudes.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw std::invalid_argument("cannot normalize a zero or non-finite vector");
  }
  amplitudes /= n;
  return PureState(std::move(layout), std::move(amplitudes));
}

double max_hermitian_defect(const CMatrix& m) {
  if (m.rows() != m.cols()) return INFINITY;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

DensityMatrix::DensityMatrix(HilbertLayout layout, CMatrix matrix)
    : layout_(std::move(layout)), matrix_(std::move(matrix)) {
  if (matrix_.rows() != layout_.total_dim() || matrix_.cols() != layout_.total_dim()) {
    throw std::invalid_argument("density matrix size does not match layout dimension");
  }
  const double herm = max_hermitian_defect(matrix_);
  if (!(herm <= tolerance::kHermitian)) {
    std::ostringstream os;
    os << "density matrix is not Hermitian (max |M - M^dag| = " << herm << ")";
    throw InvariantError(os.str());
  }
  const double tr = matrix_.trace().real();
  if (!(std::abs(tr - 1.0) <= tolerance::kTrace)) {
    std::ostringstream os;
    os << "density matrix trace is " << tr;
    throw InvariantError(os.str());
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(matrix_, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues()(0);
  if (lo < -tolerance::kNegativeEigenvalue) {
    std::ostringstream os;
    os << "density matrix has negative eigenvalue " << lo;
    throw InvariantError(os.str());
  }
}

DensityMatrix::DensityMatrix(HilbertLayout layout, CMatrix matrix, Trusted)
    : layout_(std::move(layout)), matrix_(std::move(matrix)) {}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
  // Rank one with unit norm: positivity and trace hold by construction.
  const CVector& a = psi.amplitudes();
  return DensityMatrix(psi.layout(), a * a.adjoint(), Trusted{});
}

CMatrix Spectrum::reconstruct() const {
  return eigenvectors * eigenvalues.cast<Complex>().asDiagonal() * eigenvectors.adjoint();
}

namespace {

void require_hermitian_input(const CMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("matrix is not square");
  if (m.size() == 0) return;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double defect = max_hermitian_defect(m);
  if (!(defect <= tolerance::kSpectrumInput * scale)) {
    std::ostringstream os;
    os << "matrix is not Hermitian (max |H - H^dag| = " << defect << ")";
    throw std::invalid_argument(os.str());
  }
}

void require_proper_subset(const HilbertLayout& layout, const LabelSet& keep) {
  if (keep.empty()) throw std::invalid_argument("partial trace: keep set is empty");
  for (const auto& l : keep) layout.position(l);
  if (keep.size() == layout.num_factors()) {
    throw std::invalid_argument("partial trace: keep covers every factor (nothing to trace)");
  }
}

}  // namespace

Spectrum hermitian_spectrum(const CMatrix& m) {
  require_hermitian_input(m);
  if (m.size() == 0) return {};
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
  if (es.info() != Eigen::Success) throw std::runtime_error("Hermitian eigensolver failed");
  return Spectrum{es.eigenvalues(), es.eigenvectors()};
}

RVector hermitian_eigenvalues(const CMatrix& m) {
  require_hermitian_input(m);
  if (m.size() == 0) return {};
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("Hermitian eigensolver failed");
  return es.eigenvalues();
}

DensityMatrix partial_trace(const DensityMatrix& rho, const LabelSet& keep) {
  require_proper_subset(rho.layout(), keep);
  const SubsystemSplit split(rho.layout(), keep);
  const Index dk = split.kept_dim();
  const Index dr = split.rest_dim();
  const CMatrix& m = rho.matrix();
  CMatrix out = CMatrix::Zero(dk, dk);
  for (Index i = 0; i < dk; ++i) {
    for (Index j = 0; j < dk; ++j) {
      Complex acc{0.0, 0.0};
      for (Index r = 0; r < dr; ++r) acc += m(split.full_index(i, r), split.full_index(j, r));
      out(i, j) = acc;
    }
  }
  return DensityMatrix(split.kept_layout(), std::move(out));
}

DensityMatrix partial_trace(const PureState& psi, const LabelSet& keep) {
  require_proper_subset(psi.layout(), keep);
  const SubsystemSplit split(psi.layout(), keep);
  const Index dk = split.kept_dim();
  const Index dr = split.rest_dim();
  CMatrix coeff(dk, dr);
  for (Index i = 0; i < dk; ++i) {
    for (Index r = 0; r < dr; ++r) coeff(i, r) = psi.amplitudes()(split.full_index(i, r));
  }
  CMatrix reduced = coeff * coeff.adjoint();
  // Exact Hermitian symmetry; the product can differ in the last ulp.
  reduced = (0.5 * (reduced + reduced.adjoint())).eval();
  return DensityMatrix(split.kept_layout(), std::move(reduced));
}

RVector clipped_probabilities(const RVector& eigenvalues) {
  RVector p = eigenvalues;
  for (Index i = 0; i < p.size(); ++i) {
    if (p(i) < -tolerance::kNegativeEigenvalue) {
      std::ostringstream os;
      os << "eigenvalue " << p(i) << " is below the clipping tolerance";
      throw InvariantError(os.str());
    }
    if (p(i) < 0.0) p(i) = 0.0;
  }
  return p;
}

double shannon_entropy(const RVector& probabilities) {
  double s = 0.0;
  for (Index i = 0; i < probabilities.size(); ++i) {
    const double p = probabilities(i);
    if (p > tolerance::kZeroEigenvalue) s -= p * std::log(p);
  }
  return s;
}

double von_neumann_entropy(const DensityMatrix& rho) {
  return shannon_entropy(clipped_probabilities(hermitian_eigenvalues(rho.matrix())));
}

double purity(const DensityMatrix& rho) {
  // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
  return rho.matrix().squaredNorm();
}

}  // namespace ionsim
