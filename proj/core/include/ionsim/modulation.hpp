#pragma once

#include <string>
#include <variant>

namespace ionsim {

// zeta(t) = 1
struct ConstantModulation {
  bool operator==(const ConstantModulation&) const = default;
};

// zeta(t) = sech(t / (2 tau)), peaked at t = 0.
struct SechModulation {
  double tau = 0.0;

  bool operator==(const SechModulation&) const = default;
};

// Shared scalar profile multiplying every laser coupling.
using Modulation = std::variant<ConstantModulation, SechModulation>;

// Throws std::invalid_argument when tau <= 0.
void validate(const Modulation& mod);

bool is_time_dependent(const Modulation& mod);
std::string describe(const Modulation& mod);

double modulation_value(const Modulation& mod, double t);

// Theta(t) = integral of zeta over [0, t]. Closed-form antiderivative:
// t for Constant, 4 tau atan(tanh(t / (4 tau))) for Sech. Requires t >= 0.
double modulation_integral(const Modulation& mod, double t);

}  // namespace ionsim
