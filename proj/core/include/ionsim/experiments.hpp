#pragma once

// Initial-state preparation, measure series over time, (theta, gamma)
// sweeps, and entanglement sudden-birth / sudden-death detection.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ionsim/dynamics.hpp"
#include "ionsim/entanglement.hpp"
#include "ionsim/ion_model.hpp"

namespace ionsim {

struct FieldPreparation {
  double nbar = 0.0;
  int cutoff = 0;                  // N_max of the model the field is built for
  std::vector<double> amplitudes;  // q_n, n = 0..cutoff, renormalized
  double tail_deficit = 0.0;       // 1 - sum q_n^2 before renormalization
};

// Coherent field with real amplitude sqrt(nbar). The cutoff is the smallest
// N whose Poisson tail mass is <= target_deficit, plus two headroom quanta
// that stay empty so every |n; ab> and |n; ba> lands in a complete block.
FieldPreparation coherent_amplitudes(double nbar, double target_deficit);

// Same distribution for a given model cutoff: support n <= fock_cutoff - 2.
FieldPreparation coherent_amplitudes_for_cutoff(double nbar, int fock_cutoff);

// (cos theta |a b> + sin theta e^{i phi} |b a>) (x) sum_n q_n |n>
PureState prepare_initial(double theta, double phi, const FieldPreparation& field);

enum class Measure { i_concurrence, negativity, relative_entropy };

std::string_view to_string(Measure m);
Measure parse_measure(std::string_view text);
// ion1|ion2,field for i_concurrence, ion1|ion2 otherwise.
Bipartition default_cut(Measure m);

struct MeasureSeries {
  Measure measure = Measure::i_concurrence;
  Bipartition cut = default_cut(Measure::i_concurrence);
  SimParams params;
  std::vector<double> times;
  std::vector<double> values;
  double tail_deficit = 0.0;
};

// Evolves the initial state of `params` and evaluates the measure at every
// time. gamma == 0 uses the exact block propagation; gamma > 0 the
// closed-form intrinsic-decoherence map (constant modulation only). Factors
// not named by the cut are traced out before the measure is taken.
//
// Throws UnsupportedRegime for i_concurrence with gamma > 0 and for gamma > 0
// with a time-dependent modulation.
MeasureSeries run_series(const SimParams& params, Measure measure, const Bipartition& cut,
                         std::span<const double> times);
MeasureSeries run_series(const SimParams& params, std::shared_ptr<const BlockSystem> system,
                         Measure measure, const Bipartition& cut, std::span<const double> times);

struct SweepRequest {
  SimParams base;  // theta and gamma are overwritten per cell
  Measure measure = Measure::i_concurrence;
  Bipartition cut = default_cut(Measure::i_concurrence);
  std::vector<double> thetas;
  std::vector<double> gammas{0.0};
  std::vector<double> times;
  int workers = 1;
};

// One series per (theta, gamma) cell, ordered by theta index then gamma
// index. Output is identical for any worker count.
std::vector<MeasureSeries> run_sweep(const SweepRequest& request);

// Theta-only sweep at the template's gamma.
std::vector<MeasureSeries> run_theta_sweep(const SimParams& tmpl, Measure measure,
                                           const Bipartition& cut, std::span<const double> thetas,
                                           std::span<const double> times, int workers = 1);

struct SuddenEvents {
  double threshold = 1e-3;
  std::vector<double> births;
  std::vector<double> deaths;
};

// A birth is the first grid time where the value reaches the threshold after
// at least two consecutive points below it; a death is the mirror image.
// Events alternate. Requires at least three points.
SuddenEvents detect_sudden_events(std::span<const double> times, std::span<const double> values,
                                  double threshold = 1e-3);
SuddenEvents detect_sudden_events(const MeasureSeries& series, double threshold = 1e-3);

std::vector<double> linspace(double start, double stop, std::size_t count);

// Outcome of comparing a computed series against a qualitative claim.
struct ClaimReport {
  std::string name;
  bool holds = false;
  std::vector<std::pair<std::string, double>> numbers;
  std::string summary;
};

// Time-averaged relative entropy of the two-ion state is non-increasing in
// gamma (1e-6 slack).
ClaimReport check_gamma_monotone(const SimParams& base, std::span<const double> gammas,
                                 std::span<const double> times);

// First birth under sech(t/2tau) is no earlier than under constant coupling
// (one grid step slack), starting from a separable state.
ClaimReport check_sech_delay(const SimParams& base, double tau, std::span<const double> times,
                             double threshold = 1e-3);

// Threshold crossings at nbar_high are no more than at nbar_low.
ClaimReport check_nbar_smoothing(const SimParams& base, double nbar_low, double nbar_high,
                                 std::span<const double> times, double deficit = 1e-10,
                                 double threshold = 1e-3);

}  // namespace ionsim
