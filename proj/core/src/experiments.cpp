#include "ionsim/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "ionsim/errors.hpp"

namespace ionsim {

namespace {

std::vector<double> poisson_weights(double nbar, int last) {
  std::vector<double> p(static_cast<std::size_t>(last) + 1, 0.0);
  p[0] = std::exp(-nbar);
  for (int n = 1; n <= last; ++n) p[n] = p[n - 1] * nbar / n;
  return p;
}

FieldPreparation field_from_weights(double nbar, int cutoff, const std::vector<double>& weights) {
  FieldPreparation f;
  f.nbar = nbar;
  f.cutoff = cutoff;
  f.amplitudes.assign(static_cast<std::size_t>(cutoff) + 1, 0.0);
  double mass = 0.0;
  for (double w : weights) mass += w;
  f.tail_deficit = std::max(0.0, 1.0 - mass);
  const double scale = 1.0 / std::sqrt(mass);
  for (std::size_t n = 0; n < weights.size(); ++n) f.amplitudes[n] = std::sqrt(weights[n]) * scale;
  return f;
}

double time_average(std::span<const double> times, std::span<const double> values) {
  if (times.size() < 2) return values.empty() ? 0.0 : values.front();
  double area = 0.0;
  for (std::size_t i = 1; i < times.size(); ++i) {
    area += 0.5 * (values[i] + values[i - 1]) * (times[i] - times[i - 1]);
  }
  return area / (times.back() - times.front());
}

double first_or_nan(const std::vector<double>& v) {
  return v.empty() ? std::numeric_limits<double>::quiet_NaN() : v.front();
}

void require_feasible(Measure measure, double gamma, const Modulation& modulation) {
  if (gamma > 0.0 && is_time_dependent(modulation)) {
    throw UnsupportedRegime(
        "intrinsic decoherence is only solved for a time-independent coupling; modulation '" +
        describe(modulation) + "' is refused for gamma > 0");
  }
  if (gamma > 0.0 && measure == Measure::i_concurrence) {
    throw UnsupportedRegime(
        "i_concurrence is defined for pure states only; with gamma > 0 use negativity or "
        "relative_entropy");
  }
}

double evaluate_pure(const PureState& psi, Measure measure, const Bipartition& cut) {
  switch (measure) {
    case Measure::i_concurrence:
      return i_concurrence_pure(psi, cut);
    case Measure::relative_entropy:
      return relative_entropy_measure(psi, cut);
    case Measure::negativity:
      return negativity(DensityMatrix::from_pure(psi), cut);
  }
  return 0.0;
}

double evaluate_mixed(const DensityMatrix& rho, Measure measure, const Bipartition& cut) {
  switch (measure) {
    case Measure::i_concurrence:
      throw UnsupportedRegime("i_concurrence requires a pure state; the cut leaves a mixed state");
    case Measure::relative_entropy:
      return relative_entropy_measure(rho, cut);
    case Measure::negativity:
      return negativity(rho, cut);
  }
  return 0.0;
}

}  // namespace

FieldPreparation coherent_amplitudes(double nbar, double target_deficit) {
  if (!(nbar >= 0.0) || !std::isfinite(nbar)) throw std::invalid_argument("nbar must be >= 0");
  if (!(target_deficit > 0.0)) throw std::invalid_argument("target deficit must be > 0");
  double weight = std::exp(-nbar);
  double mass = weight;
  int n = 0;
  constexpr int kMaxFock = 100000;
  while (1.0 - mass > target_deficit) {
    ++n;
    if (n > kMaxFock) throw CutoffError("Poisson tail did not converge below the target deficit");
    weight *= nbar / n;
    mass += weight;
  }
  return field_from_weights(nbar, n + 2, poisson_weights(nbar, n));
}

FieldPreparation coherent_amplitudes_for_cutoff(double nbar, int fock_cutoff) {
  if (!(nbar >= 0.0) || !std::isfinite(nbar)) throw std::invalid_argument("nbar must be >= 0");
  if (fock_cutoff < 2) throw CutoffError("fock_cutoff must be >= 2");
  return field_from_weights(nbar, fock_cutoff, poisson_weights(nbar, fock_cutoff - 2));
}

PureState prepare_initial(double theta, double phi, const FieldPreparation& field) {
  const HilbertLayout layout = ion_layout(field.cutoff);
  CVector amps = CVector::Zero(layout.total_dim());
  const Complex c_ab{std::cos(theta), 0.0};
  const Complex c_ba = std::sin(theta) * std::exp(Complex(0.0, phi));
  for (int n = 0; n <= field.cutoff; ++n) {
    const double q = field.amplitudes[static_cast<std::size_t>(n)];
    if (q == 0.0) continue;
    amps(full_index({n, Level::a, Level::b}, field.cutoff)) = c_ab * q;
    amps(full_index({n, Level::b, Level::a}, field.cutoff)) = c_ba * q;
  }
  return PureState::normalized(layout, std::move(amps));
}

std::string_view to_string(Measure m) {
  switch (m) {
    case Measure::i_concurrence:
      return "i_concurrence";
    case Measure::negativity:
      return "negativity";
    case Measure::relative_entropy:
      return "relative_entropy";
  }
  return "?";
}

Measure parse_measure(std::string_view text) {
  for (Measure m : {Measure::i_concurrence, Measure::negativity, Measure::relative_entropy}) {
    if (text == to_string(m)) return m;
  }
  throw std::invalid_argument("unknown measure '" + std::string(text) +
                              "' (expected i_concurrence, negativity or relative_entropy)");
}

Bipartition default_cut(Measure m) {
  if (m == Measure::i_concurrence) {
    return Bipartition({std::string(kIon1)}, {std::string(kIon2), std::string(kField)});
  }
  return Bipartition({std::string(kIon1)}, {std::string(kIon2)});
}

MeasureSeries run_series(const SimParams& params, std::shared_ptr<const BlockSystem> system,
                         Measure measure, const Bipartition& cut, std::span<const double> times) {
  params.validate();
  validate_time_grid(times);
  require_feasible(measure, params.gamma, params.modulation);
  if (system->fock_cutoff() != params.fock_cutoff) {
    throw std::invalid_argument("block system was built for a different cutoff");
  }
  const HilbertLayout& layout = system->layout();
  for (const auto& l : cut.labels()) {
    if (!layout.contains(l)) throw std::invalid_argument("cut names unknown factor '" + l + "'");
  }
  const bool reduce = !cut.covers(layout);
  const LabelSet kept = cut.labels();
  const bool ions_only = kept == LabelSet{std::string(kIon1), std::string(kIon2)};

  const FieldPreparation field = coherent_amplitudes_for_cutoff(params.nbar, params.fock_cutoff);
  const PureState psi0 = prepare_initial(params.theta, params.phi, field);

  MeasureSeries out{measure, cut, params, {times.begin(), times.end()}, {}, field.tail_deficit};
  out.values.reserve(times.size());

  if (params.gamma == 0.0) {
    if (reduce && measure == Measure::i_concurrence) {
      throw UnsupportedRegime("i_concurrence requires the cut to cover every factor");
    }
    const BlockPropagator prop(system, psi0);
    for (double t : times) {
      const PureState psi(layout, prop.amplitudes_at(modulation_integral(params.modulation, t)));
      out.values.push_back(reduce ? evaluate_mixed(partial_trace(psi, kept), measure, cut)
                                  : evaluate_pure(psi, measure, cut));
    }
  } else {
    const BlockMilburnEvolver evolver(system, psi0, params.gamma, params.modulation);
    for (double t : times) {
      if (ions_only) {
        out.values.push_back(evaluate_mixed(evolver.ion_state(t), measure, cut));
      } else if (reduce) {
        out.values.push_back(evaluate_mixed(partial_trace(evolver.state(t), kept), measure, cut));
      } else {
        out.values.push_back(evaluate_mixed(evolver.state(t), measure, cut));
      }
    }
  }
  return out;
}

MeasureSeries run_series(const SimParams& params, Measure measure, const Bipartition& cut,
                         std::span<const double> times) {
  params.validate();
  require_feasible(measure, params.gamma, params.modulation);
  return run_series(params, std::make_shared<const BlockSystem>(params), measure, cut, times);
}

std::vector<MeasureSeries> run_sweep(const SweepRequest& request) {
  if (request.thetas.empty() || request.gammas.empty() || request.times.empty()) {
    throw std::invalid_argument("sweep grids must be nonempty");
  }
  request.base.validate();
  validate_time_grid(request.times);
  for (double g : request.gammas) require_feasible(request.measure, g, request.base.modulation);

  const auto system = std::make_shared<const BlockSystem>(request.base);
  const std::size_t n_gamma = request.gammas.size();
  const std::size_t cells = request.thetas.size() * n_gamma;
  std::vector<std::optional<MeasureSeries>> results(cells);
  std::vector<std::exception_ptr> errors(cells);
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (std::size_t cell = next++; cell < cells; cell = next++) {
      try {
        SimParams p = request.base;
        p.theta = request.thetas[cell / n_gamma];
        p.gamma = request.gammas[cell % n_gamma];
        results[cell] = run_series(p, system, request.measure, request.cut, request.times);
      } catch (...) {
        errors[cell] = std::current_exception();
      }
    }
  };

  const int workers = std::clamp(request.workers, 1, static_cast<int>(std::max<std::size_t>(cells, 1)));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<MeasureSeries> out;
  out.reserve(cells);
  for (auto& r : results) out.push_back(std::move(*r));
  return out;
}

std::vector<MeasureSeries> run_theta_sweep(const SimParams& tmpl, Measure measure,
                                           const Bipartition& cut, std::span<const double> thetas,
                                           std::span<const double> times, int workers) {
  SweepRequest req;
  req.base = tmpl;
  req.measure = measure;
  req.cut = cut;
  req.thetas.assign(thetas.begin(), thetas.end());
  req.gammas = {tmpl.gamma};
  req.times.assign(times.begin(), times.end());
  req.workers = workers;
  return run_sweep(req);
}

SuddenEvents detect_sudden_events(std::span<const double> times, std::span<const double> values,
                                  double threshold) {
  if (!(threshold > 0.0)) throw std::invalid_argument("event threshold must be > 0");
  if (times.size() != values.size()) throw std::invalid_argument("times and values differ in length");
  if (times.size() < 3) throw std::invalid_argument("event detection needs at least 3 grid points");

  SuddenEvents ev;
  ev.threshold = threshold;
  enum class Last { none, birth, death } last = Last::none;
  bool above = values[0] >= threshold;
  std::size_t run = 1;
  for (std::size_t i = 1; i < values.size(); ++i) {
    const bool now = values[i] >= threshold;
    if (now == above) {
      ++run;
      continue;
    }
    if (run >= 2) {
      if (now && last != Last::birth) {
        ev.births.push_back(times[i]);
        last = Last::birth;
      } else if (!now && last != Last::death) {
        ev.deaths.push_back(times[i]);
        last = Last::death;
      }
    }
    above = now;
    run = 1;
  }
  return ev;
}

SuddenEvents detect_sudden_events(const MeasureSeries& series, double threshold) {
  return detect_sudden_events(series.times, series.values, threshold);
}

std::vector<double> linspace(double start, double stop, std::size_t count) {
  if (count == 0) return {};
  if (count == 1) return {start};
  std::vector<double> out(count);
  const double step = (stop - start) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) out[i] = start + step * static_cast<double>(i);
  out.back() = stop;
  return out;
}

ClaimReport check_gamma_monotone(const SimParams& base, std::span<const double> gammas,
                                 std::span<const double> times) {
  ClaimReport r;
  r.name = "gamma_monotone_decay";
  const auto system = std::make_shared<const BlockSystem>(base);
  const Bipartition cut = default_cut(Measure::relative_entropy);
  std::vector<double> averages;
  for (double g : gammas) {
    SimParams p = base;
    p.gamma = g;
    const auto s = run_series(p, system, Measure::relative_entropy, cut, times);
    averages.push_back(time_average(s.times, s.values));
    std::ostringstream key;
    key << "mean_relative_entropy(gamma=" << g << ")";
    r.numbers.emplace_back(key.str(), averages.back());
  }
  r.holds = true;
  for (std::size_t i = 1; i < averages.size(); ++i) {
    if (averages[i] > averages[i - 1] + 1e-6) r.holds = false;
  }
  r.summary = r.holds ? "time-averaged two-ion relative entropy is non-increasing in gamma"
                      : "time-averaged two-ion relative entropy increases with gamma somewhere";
  return r;
}

ClaimReport check_sech_delay(const SimParams& base, double tau, std::span<const double> times,
                             double threshold) {
  ClaimReport r;
  r.name = "sech_delays_birth";
  const auto system = std::make_shared<const BlockSystem>(base);
  const Bipartition cut = default_cut(Measure::i_concurrence);

  SimParams constant = base;
  constant.gamma = 0.0;
  constant.modulation = ConstantModulation{};
  SimParams sech = constant;
  sech.modulation = SechModulation{tau};

  const auto sc = run_series(constant, system, Measure::i_concurrence, cut, times);
  const auto ss = run_series(sech, system, Measure::i_concurrence, cut, times);
  const double bc = first_or_nan(detect_sudden_events(sc, threshold).births);
  const double bs = first_or_nan(detect_sudden_events(ss, threshold).births);
  const double step = times.size() > 1 ? times[1] - times[0] : 0.0;
  r.numbers = {{"theta", base.theta},
               {"tau", tau},
               {"first_birth_constant", bc},
               {"first_birth_sech", bs},
               {"grid_step", step}};
  r.holds = std::isfinite(bc) && std::isfinite(bs) && bs >= bc - step;
  if (!std::isfinite(bc) || !std::isfinite(bs)) {
    r.summary = "no sudden birth detected in at least one of the two runs";
  } else {
    r.summary = r.holds ? "sech modulation does not advance the first birth"
                        : "sech modulation advances the first birth";
  }
  return r;
}

ClaimReport check_nbar_smoothing(const SimParams& base, double nbar_low, double nbar_high,
                                 std::span<const double> times, double deficit, double threshold) {
  ClaimReport r;
  r.name = "nbar_smoothing";
  std::vector<std::size_t> counts;
  for (double nbar : {nbar_low, nbar_high}) {
    SimParams p = base;
    p.gamma = 0.0;
    p.nbar = nbar;
    p.fock_cutoff = coherent_amplitudes(nbar, deficit).cutoff;
    const auto s = run_series(p, Measure::i_concurrence, default_cut(Measure::i_concurrence), times);
    const auto ev = detect_sudden_events(s, threshold);
    counts.push_back(ev.births.size() + ev.deaths.size());
  }
  r.numbers = {{"nbar_low", nbar_low},
               {"crossings_low", static_cast<double>(counts[0])},
               {"nbar_high", nbar_high},
               {"crossings_high", static_cast<double>(counts[1])}};
  r.holds = counts[1] <= counts[0];
  r.summary = r.holds ? "larger nbar gives no more threshold crossings"
                      : "larger nbar gives more threshold crossings";
  return r;
}

}  // namespace ionsim
