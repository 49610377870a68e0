#include "ionsim_app/selftest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "ionsim/experiments.hpp"

namespace ionsim::app {

namespace {

SimParams reference_params(int cutoff, double nbar) {
  SimParams p;
  p.lambda1 = 1.0;
  p.lambda2 = 0.01;
  p.eta = 0.202;
  p.epsilon = 0.01;
  p.nbar = nbar;
  p.fock_cutoff = cutoff;
  return p;
}

// -(eps/2) n!/(n+k)! L_n^k(eta^2) exp(-eta^2/2), Laguerre by explicit sum.
double mode_strength_reference(int n, int k, double eta, double eps) {
  const double x = eta * eta;
  double l = 0.0;
  for (int j = 0; j <= n; ++j) {
    double binom = 1.0;
    for (int i = 1; i <= n - j; ++i) binom *= static_cast<double>(k + j + i) / i;
    double term = binom;
    for (int i = 1; i <= j; ++i) term *= x / i;
    l += (j % 2 ? -term : term);
  }
  double ratio = 1.0;
  for (int i = n + 1; i <= n + k; ++i) ratio /= i;
  return -0.5 * eps * ratio * l * std::exp(-0.5 * x);
}

CheckResult check_mode_strength() {
  CheckResult r{"mode_strength closed form", false, true, 0.0, 1e-12, ""};
  const SimParams p = reference_params(14, 0.0);
  for (int n = 0; n <= 12; ++n)
    for (int k = 0; k <= 2; ++k) {
      r.deviation = std::max(r.deviation, std::abs(mode_strength(n, k, p) - mode_strength_reference(n, k, p.eta, p.epsilon)));
    }
  r.passed = r.deviation <= r.tolerance;
  r.detail = "n <= 12, k <= 2, eta = 0.202, eps = 0.01";
  return r;
}

CheckResult check_block_vs_dense() {
  CheckResult r{"block vs dense propagation", false, true, 0.0, 1e-8, ""};
  const SimParams p = reference_params(12, 2.0);
  const auto field = coherent_amplitudes_for_cutoff(p.nbar, p.fock_cutoff);
  const auto times = linspace(0.0, 5.0, 51);
  for (double theta : {0.0, M_PI / 6, M_PI / 4}) {
    const auto psi0 = prepare_initial(theta, 0.0, field);
    const auto a = evolve_pure(psi0, p, times);
    const auto b = evolve_pure_dense(psi0, p, times);
    for (std::size_t i = 0; i < times.size(); ++i) {
      r.deviation = std::max(r.deviation, (a.states[i].amplitudes() - b.states[i].amplitudes()).cwiseAbs().maxCoeff());
    }
  }
  r.passed = r.deviation <= r.tolerance;
  r.detail = "N_max = 12, nbar = 2, theta in {0, pi/6, pi/4}, 51 times";
  return r;
}

CheckResult check_kraus() {
  CheckResult r{"Kraus sum vs closed-form decoherence", false, true, 0.0, 1e-10, ""};
  const SimParams p = reference_params(8, 2.0);
  const CMatrix h = build_full_hamiltonian(p);
  const auto rho0 = DensityMatrix::from_pure(
      prepare_initial(M_PI / 4, 0.0, coherent_amplitudes_for_cutoff(p.nbar, p.fock_cutoff)));
  double worst_deficit = 0.0;
  int terms = 0;
  for (double gt : {0.1, 1.0, 5.0}) {
    const double t = 1.0;
    const auto k = milburn_kraus_adaptive(rho0, h, gt / t, t);
    const auto c = milburn_closed_form(rho0, h, gt / t, t);
    r.deviation = std::max(r.deviation, (k.state - c.matrix()).cwiseAbs().maxCoeff());
    worst_deficit = std::max(worst_deficit, k.completeness_deficit);
    terms = std::max(terms, k.terms);
  }
  r.passed = r.deviation <= r.tolerance && worst_deficit <= 1e-10;
  std::ostringstream d;
  d << "N_max = 8, gamma t in {0.1, 1, 5}, completeness deficit " << worst_deficit << ", K <= " << terms;
  r.detail = d.str();
  return r;
}

CheckResult check_initial_concurrence() {
  CheckResult r{"initial I-concurrence = |sin 2 theta|", false, true, 0.0, 1e-10, ""};
  const auto field = coherent_amplitudes(5.0, 1e-10);
  const Bipartition cut = default_cut(Measure::i_concurrence);
  for (double theta : linspace(0.0, M_PI, 13)) {
    const double c = i_concurrence_pure(prepare_initial(theta, 0.0, field), cut);
    r.deviation = std::max(r.deviation, std::abs(c - std::abs(std::sin(2 * theta))));
  }
  r.passed = r.deviation <= r.tolerance;
  r.detail = "13 theta points on [0, pi], nbar = 5";
  return r;
}

CheckResult check_modulation_limit() {
  CheckResult r{"sech phase limit Theta(100 tau) = pi tau", false, true, 0.0, 1e-10, ""};
  for (double tau : {0.5, 1.0, 5.0}) {
    r.deviation = std::max(r.deviation, std::abs(modulation_integral(SechModulation{tau}, 100.0 * tau) - M_PI * tau));
  }
  r.passed = r.deviation <= r.tolerance;
  r.detail = "tau in {0.5, 1, 5}";
  return r;
}

CheckResult from_claim(const ClaimReport& c) {
  CheckResult r;
  r.name = c.name;
  r.passed = c.holds;
  r.fatal = false;
  std::ostringstream d;
  d << c.summary;
  for (const auto& [k, v] : c.numbers) d << "; " << k << " = " << v;
  r.detail = d.str();
  return r;
}

}  // namespace

std::vector<CheckResult> oracle_checks() {
  return {check_mode_strength(), check_block_vs_dense(), check_kraus(), check_initial_concurrence(),
          check_modulation_limit()};
}

std::vector<CheckResult> claim_reports() {
  std::vector<CheckResult> out;
  SimParams base = reference_params(coherent_amplitudes(5.0, 1e-10).cutoff, 5.0);
  base.theta = M_PI / 4;
  const std::vector<double> gammas{0.0, 0.01, 0.05, 0.1};
  out.push_back(from_claim(check_gamma_monotone(base, gammas, linspace(0.0, 30.0, 301))));

  SimParams separable = base;
  separable.theta = 0.0;
  out.push_back(from_claim(check_sech_delay(separable, 5.0, linspace(0.0, 30.0, 3001))));

  out.push_back(from_claim(check_nbar_smoothing(base, 5.0, 15.0, linspace(0.0, 30.0, 601))));
  return out;
}

int run_selftest(std::ostream& out, bool with_claims) {
  auto print = [&out](const CheckResult& r) {
    const char* tag = r.passed ? "PASS" : (r.fatal ? "FAIL" : "WARN");
    out << "[" << tag << "] " << r.name;
    if (r.fatal) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "  max_dev=%.3e tol=%.1e", r.deviation, r.tolerance);
      out << buf;
    }
    if (!r.detail.empty()) out << "  (" << r.detail << ")";
    out << "\n";
  };
  int failed = 0;
  for (const auto& r : oracle_checks()) {
    print(r);
    if (!r.passed) ++failed;
  }
  if (with_claims) {
    for (const auto& r : claim_reports()) print(r);
  }
  out << (failed == 0 ? "selftest: all oracle checks passed\n" : "selftest: " + std::to_string(failed) + " oracle check(s) failed\n");
  return failed == 0 ? 0 : 1;
}

}  // namespace ionsim::app
