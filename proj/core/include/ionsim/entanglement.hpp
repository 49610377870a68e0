#pragma once

#include <limits>
#include <string>
#include <string_view>

#include "ionsim/quantum_core.hpp"

namespace ionsim {

// Split of a set of factor labels into two disjoint nonempty sides.
class Bipartition {
 public:
  Bipartition(LabelSet side_a, LabelSet side_b);

  // "ion1|ion2,field" (whitespace ignored).
  static Bipartition parse(std::string_view text);

  const LabelSet& side_a() const { return side_a_; }
  const LabelSet& side_b() const { return side_b_; }
  LabelSet labels() const;
  Bipartition swapped() const { return Bipartition(side_b_, side_a_); }

  // True if the two sides cover every factor of the layout.
  bool covers(const HilbertLayout& layout) const;
  // Throws std::invalid_argument unless both sides name factors of the
  // layout and together cover it.
  void require_covers(const HilbertLayout& layout) const;

  std::string to_string() const;
  bool operator==(const Bipartition&) const = default;

 private:
  LabelSet side_a_;
  LabelSet side_b_;
};

// Returned by relative_entropy_measure when rho has support outside the
// support of rho_A (x) rho_B.
inline constexpr double kInfiniteDistance = std::numeric_limits<double>::infinity();

// sqrt(2 (1 - Tr rho_A^2)) for a normalized pure state.
double i_concurrence_pure(const PureState& psi, const Bipartition& cut);

// Upper bound sqrt(2 (d - 1) / d) of the I-concurrence, d = min(dim_A, dim_B).
double i_concurrence_ceiling(Index d);

// Sum of |negative eigenvalues| of the partial transpose over side_b.
double negativity(const DensityMatrix& rho, const Bipartition& cut);

// Tr rho (log rho - log(rho_A (x) rho_B)) in nats.
double relative_entropy_measure(const DensityMatrix& rho, const Bipartition& cut);
// Same trace formula for a pure global state; Tr rho log rho vanishes for a
// rank-one rho and the product term is evaluated on the marginals.
double relative_entropy_measure(const PureState& psi, const Bipartition& cut);

}  // namespace ionsim
