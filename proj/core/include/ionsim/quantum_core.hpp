#pragma once

// Dimension-generic containers for states on a tensor-product space,
// partial traces, Hermitian spectra and entropy primitives.

#include <complex>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace ionsim {

using Complex = std::complex<double>;
using Index = Eigen::Index;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using LabelSet = std::set<std::string>;

namespace tolerance {
inline constexpr double kNorm = 1e-10;
inline constexpr double kTrace = 1e-10;
inline constexpr double kHermitian = 1e-12;
inline constexpr double kSpectrumInput = 1e-10;
inline constexpr double kNegativeEigenvalue = 1e-9;
inline constexpr double kZeroEigenvalue = 1e-14;
}  // namespace tolerance

struct Factor {
  std::string label;
  int dim = 1;

  bool operator==(const Factor&) const = default;
};

// Ordered tensor factors. Index convention is row-major: the first factor
// is the most significant digit of the flat index.
class HilbertLayout {
 public:
  HilbertLayout() = default;
  explicit HilbertLayout(std::vector<Factor> factors);

  const std::vector<Factor>& factors() const { return factors_; }
  std::size_t num_factors() const { return factors_.size(); }
  Index total_dim() const { return total_dim_; }

  bool contains(std::string_view label) const;
  // Throws std::invalid_argument for an unknown label.
  std::size_t position(std::string_view label) const;
  LabelSet labels() const;

  // Sub-layout with the given labels, in this layout's order.
  HilbertLayout restricted_to(const LabelSet& labels) const;

  bool operator==(const HilbertLayout&) const = default;

 private:
  std::vector<Factor> factors_;
  Index total_dim_ = 1;
};

// Maps flat indices of a layout onto (kept, rest) index pairs for a split of
// its factors. Either side may be empty (dimension 1).
class SubsystemSplit {
 public:
  SubsystemSplit(const HilbertLayout& layout, const LabelSet& kept);

  const HilbertLayout& kept_layout() const { return kept_; }
  const HilbertLayout& rest_layout() const { return rest_; }
  Index kept_dim() const { return kept_.total_dim(); }
  Index rest_dim() const { return rest_.total_dim(); }

  Index full_index(Index kept, Index rest) const { return table_[kept * rest_dim() + rest]; }
  Index kept_part(Index full) const { return kept_of_[full]; }
  Index rest_part(Index full) const { return rest_of_[full]; }

 private:
  HilbertLayout kept_;
  HilbertLayout rest_;
  std::vector<Index> table_;
  std::vector<Index> kept_of_;
  std::vector<Index> rest_of_;
};

class PureState {
 public:
  // Requires | ||amplitudes||^2 - 1 | <= 1e-10.
  PureState(HilbertLayout layout, CVector amplitudes);
  // Rescales to unit norm; throws on a zero vector.
  static PureState normalized(HilbertLayout layout, CVector amplitudes);

  const HilbertLayout& layout() const { return layout_; }
  const CVector& amplitudes() const { return amplitudes_; }

 private:
  HilbertLayout layout_;
  CVector amplitudes_;
};

class DensityMatrix {
 public:
  // Validates Hermiticity (1e-12), unit trace (1e-10) and
  // min eigenvalue >= -1e-9; throws InvariantError otherwise.
  DensityMatrix(HilbertLayout layout, CMatrix matrix);
  static DensityMatrix from_pure(const PureState& psi);

  const HilbertLayout& layout() const { return layout_; }
  const CMatrix& matrix() const { return matrix_; }
  Index dim() const { return matrix_.rows(); }

 private:
  struct Trusted {};
  DensityMatrix(HilbertLayout layout, CMatrix matrix, Trusted);

  HilbertLayout layout_;
  CMatrix matrix_;
};

struct Spectrum {
  RVector eigenvalues;   // ascending
  CMatrix eigenvectors;  // columns

  CMatrix reconstruct() const;
};

double max_hermitian_defect(const CMatrix& m);

// Throws std::invalid_argument if m deviates from Hermitian by more than
// 1e-10 (max elementwise, scaled by max(1, max|m_ij|)).
Spectrum hermitian_spectrum(const CMatrix& m);
RVector hermitian_eigenvalues(const CMatrix& m);

// Errors: unknown label, empty keep, or keep covering every factor.
DensityMatrix partial_trace(const DensityMatrix& rho, const LabelSet& keep);
DensityMatrix partial_trace(const PureState& psi, const LabelSet& keep);

// Eigenvalues in [-1e-9, 0) are clipped to zero; anything more negative
// throws InvariantError.
RVector clipped_probabilities(const RVector& eigenvalues);

double von_neumann_entropy(const DensityMatrix& rho);
double shannon_entropy(const RVector& probabilities);
double purity(const DensityMatrix& rho);

}  // namespace ionsim
