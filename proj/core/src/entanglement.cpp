#include "ionsim/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ionsim/errors.hpp"

namespace ionsim {

namespace {

// Support leakage beyond this trace weight makes the distance infinite.
constexpr double kSupportLeak = 1e-12;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

LabelSet parse_side(std::string_view text) {
  LabelSet out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto piece = trim(text.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                               : comma - start));
    if (piece.empty()) throw std::invalid_argument("empty factor label in bipartition");
    out.insert(piece);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

// Spectral log on the support; projector onto the kernel.
struct SpectralLog {
  CMatrix log;
  CMatrix kernel;
};

SpectralLog spectral_log(const DensityMatrix& rho) {
  const Spectrum spec = hermitian_spectrum(rho.matrix());
  const RVector p = clipped_probabilities(spec.eigenvalues);
  const Index d = p.size();
  CVector log_diag = CVector::Zero(d);
  CVector ker_diag = CVector::Zero(d);
  for (Index i = 0; i < d; ++i) {
    if (p(i) > tolerance::kZeroEigenvalue) {
      log_diag(i) = std::log(p(i));
    } else {
      ker_diag(i) = 1.0;
    }
  }
  const CMatrix& v = spec.eigenvectors;
  return {v * log_diag.asDiagonal() * v.adjoint(), v * ker_diag.asDiagonal() * v.adjoint()};
}

// Tr(rho (X_A (x) 1_B + 1_A (x) X_B)) evaluated with rho in the layout order.
double product_trace(const CMatrix& rho, const SubsystemSplit& split, const CMatrix& xa,
                     const CMatrix& xb) {
  const Index d = rho.rows();
  Complex acc{0.0, 0.0};
  for (Index i = 0; i < d; ++i) {
    const Index ai = split.kept_part(i);
    const Index bi = split.rest_part(i);
    for (Index j = 0; j < d; ++j) {
      const Index aj = split.kept_part(j);
      const Index bj = split.rest_part(j);
      Complex op{0.0, 0.0};
      if (bi == bj) op += xa(ai, aj);
      if (ai == aj) op += xb(bi, bj);
      if (op != Complex{0.0, 0.0}) acc += rho(j, i) * op;
    }
  }
  return acc.real();
}

}  // namespace

Bipartition::Bipartition(LabelSet side_a, LabelSet side_b)
    : side_a_(std::move(side_a)), side_b_(std::move(side_b)) {
  if (side_a_.empty() || side_b_.empty()) throw std::invalid_argument("bipartition sides must be nonempty");
  for (const auto& l : side_a_) {
    if (side_b_.count(l)) throw std::invalid_argument("bipartition sides overlap on '" + l + "'");
  }
}

Bipartition Bipartition::parse(std::string_view text) {
  const auto bar = text.find('|');
  if (bar == std::string_view::npos || text.find('|', bar + 1) != std::string_view::npos) {
    throw std::invalid_argument("bipartition must have the form 'a,b|c,d'");
  }
  return Bipartition(parse_side(text.substr(0, bar)), parse_side(text.substr(bar + 1)));
}

LabelSet Bipartition::labels() const {
  LabelSet all = side_a_;
  all.insert(side_b_.begin(), side_b_.end());
  return all;
}

bool Bipartition::covers(const HilbertLayout& layout) const { return labels() == layout.labels(); }

void Bipartition::require_covers(const HilbertLayout& layout) const {
  for (const auto& l : labels()) {
    if (!layout.contains(l)) throw std::invalid_argument("bipartition names unknown factor '" + l + "'");
  }
  if (!covers(layout)) {
    throw std::invalid_argument("bipartition " + to_string() + " does not cover every factor");
  }
}

std::string Bipartition::to_string() const {
  std::string out;
  auto join = [&out](const LabelSet& s) {
    bool first = true;
    for (const auto& l : s) {
      if (!first) out += ',';
      out += l;
      first = false;
    }
  };
  join(side_a_);
  out += '|';
  join(side_b_);
  return out;
}

double i_concurrence_ceiling(Index d) {
  if (d < 1) throw std::invalid_argument("dimension must be positive");
  return std::sqrt(2.0 * static_cast<double>(d - 1) / static_cast<double>(d));
}

double i_concurrence_pure(const PureState& psi, const Bipartition& cut) {
  cut.require_covers(psi.layout());
  // Tr rho_A^2 = Tr rho_B^2; reduce onto the smaller side.
  const Index da = psi.layout().restricted_to(cut.side_a()).total_dim();
  const Index db = psi.layout().restricted_to(cut.side_b()).total_dim();
  const LabelSet& keep = da <= db ? cut.side_a() : cut.side_b();
  const double p = purity(partial_trace(psi, keep));
  return std::sqrt(std::max(0.0, 2.0 * (1.0 - p)));
}

double negativity(const DensityMatrix& rho, const Bipartition& cut) {
  cut.require_covers(rho.layout());
  const SubsystemSplit split(rho.layout(), cut.side_a());
  const CMatrix& m = rho.matrix();
  const Index d = m.rows();
  CMatrix pt(d, d);
  for (Index i = 0; i < d; ++i) {
    const Index ai = split.kept_part(i);
    const Index bi = split.rest_part(i);
    for (Index j = 0; j < d; ++j) {
      const Index aj = split.kept_part(j);
      const Index bj = split.rest_part(j);
      pt(i, j) = m(split.full_index(ai, bj), split.full_index(aj, bi));
    }
  }
  const RVector ev = hermitian_eigenvalues(pt);
  double neg = 0.0;
  for (Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < 0.0) neg -= ev(i);
  }
  return neg;
}

double relative_entropy_measure(const DensityMatrix& rho, const Bipartition& cut) {
  cut.require_covers(rho.layout());
  const SubsystemSplit split(rho.layout(), cut.side_a());
  const DensityMatrix rho_a = partial_trace(rho, cut.side_a());
  const DensityMatrix rho_b = partial_trace(rho, cut.side_b());
  const SpectralLog la = spectral_log(rho_a);
  const SpectralLog lb = spectral_log(rho_b);

  // Weight of rho outside supp(rho_A) (x) supp(rho_B).
  const CMatrix zero_b = CMatrix::Zero(lb.kernel.rows(), lb.kernel.cols());
  const CMatrix zero_a = CMatrix::Zero(la.kernel.rows(), la.kernel.cols());
  const double leak = product_trace(rho.matrix(), split, la.kernel, zero_b) +
                      product_trace(rho.matrix(), split, zero_a, lb.kernel);
  if (leak > kSupportLeak) return kInfiniteDistance;

  const double self = -von_neumann_entropy(rho);  // Tr rho log rho
  const double cross = product_trace(rho.matrix(), split, la.log, lb.log);
  return self - cross;
}

double relative_entropy_measure(const PureState& psi, const Bipartition& cut) {
  cut.require_covers(psi.layout());
  const DensityMatrix rho_a = partial_trace(psi, cut.side_a());
  const DensityMatrix rho_b = partial_trace(psi, cut.side_b());
  const SpectralLog la = spectral_log(rho_a);
  const SpectralLog lb = spectral_log(rho_b);
  // <psi| X_A (x) 1 |psi> = Tr(rho_A X_A)
  auto expect = [](const DensityMatrix& r, const CMatrix& x) {
    return (r.matrix() * x).trace().real();
  };
  const double leak = expect(rho_a, la.kernel) + expect(rho_b, lb.kernel);
  if (leak > kSupportLeak) return kInfiniteDistance;
  const double cross = expect(rho_a, la.log) + expect(rho_b, lb.log);
  return 0.0 - cross;
}

}  // namespace ionsim
