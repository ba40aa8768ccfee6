#include "ldp/modulus.hpp"

#include <cmath>
#include <cstdio>
#include <utility>

#include "ldp/types.hpp"

namespace ldp {

namespace {
constexpr double kInvE = 0.36787944117144233;
}  // namespace

Modulus::Modulus(ModulusKind kind, double c, std::string label,
                 std::function<double(double)> fn)
    : kind_(kind), c_(c), label_(std::move(label)), fn_(std::move(fn)) {}

Modulus Modulus::Linear(double c) {
  if (!(c >= 0.0)) throw ConfigError("Linear modulus needs c >= 0");
  return Modulus(ModulusKind::kLinear, c, "linear", nullptr);
}

Modulus Modulus::XLog1OverX(double c) {
  if (!(c > 0.0)) throw ConfigError("XLog1OverX modulus needs c > 0");
  return Modulus(ModulusKind::kXLog1OverX, c, "xlog1overx", nullptr);
}

Modulus Modulus::XLogXPlus1() {
  return Modulus(ModulusKind::kXLogXPlus1, 1.0, "xlogx_plus1", nullptr);
}

Modulus Modulus::Custom(std::string label, std::function<double(double)> fn) {
  if (!fn) throw ConfigError("Custom modulus needs a callable");
  return Modulus(ModulusKind::kCustom, 1.0, std::move(label), std::move(fn));
}

double Modulus::operator()(double s) const {
  switch (kind_) {
    case ModulusKind::kLinear:
      return c_ * s;
    case ModulusKind::kXLog1OverX:
      // s log(1/s) peaks at 1/e; hold the peak value beyond it.
      if (s >= kInvE) return c_ * kInvE;
      return s > 0.0 ? c_ * s * std::log(1.0 / s) : 0.0;
    case ModulusKind::kXLogXPlus1:
      return s > 1.0 ? s * std::log(s) + 1.0 : 1.0;
    case ModulusKind::kCustom:
      return fn_(s);
  }
  return 0.0;
}

std::string Modulus::describe() const {
  char buf[64];
  switch (kind_) {
    case ModulusKind::kLinear:
      std::snprintf(buf, sizeof buf, "linear(c=%.6g)", c_);
      return buf;
    case ModulusKind::kXLog1OverX:
      std::snprintf(buf, sizeof buf, "xlog1overx(c=%.6g)", c_);
      return buf;
    case ModulusKind::kXLogXPlus1:
      return "xlogx_plus1";
    case ModulusKind::kCustom:
      return "custom(" + label_ + ")";
  }
  return {};
}

}  // namespace ldp
