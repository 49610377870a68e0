#include "ionsim/modulation.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ionsim {

namespace {
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;
}  // namespace

void validate(const Modulation& mod) {
  if (const auto* s = std::get_if<SechModulation>(&mod)) {
    if (!(s->tau > 0.0) || !std::isfinite(s->tau)) {
      throw std::invalid_argument("sech modulation requires tau > 0");
    }
  }
}

bool is_time_dependent(const Modulation& mod) {
  return std::holds_alternative<SechModulation>(mod);
}

std::string describe(const Modulation& mod) {
  return std::visit(overloaded{
                        [](const ConstantModulation&) { return std::string("constant"); },
                        [](const SechModulation& s) {
                          std::ostringstream os;
                          os.precision(17);
                          os << "sech(t/(2*" << s.tau << "))";
                          return os.str();
                        },
                    },
                    mod);
}

double modulation_value(const Modulation& mod, double t) {
  validate(mod);
  return std::visit(overloaded{
                        [](const ConstantModulation&) { return 1.0; },
                        [t](const SechModulation& s) { return 1.0 / std::cosh(t / (2.0 * s.tau)); },
                    },
                    mod);
}

double modulation_integral(const Modulation& mod, double t) {
  validate(mod);
  if (!(t >= 0.0)) throw std::invalid_argument("modulation_integral requires t >= 0");
  return std::visit(overloaded{
                        [t](const ConstantModulation&) { return t; },
                        [t](const SechModulation& s) {
                          return 4.0 * s.tau * std::atan(std::tanh(t / (4.0 * s.tau)));
                        },
                    },
                    mod);
}

}  // namespace ionsim
