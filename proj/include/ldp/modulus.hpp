#pragma once

#include <functional>
#include <string>

namespace ldp {

enum class ModulusKind { kLinear, kXLog1OverX, kXLogXPlus1, kCustom };

/// An increasing continuous function on [0, inf) used as eta_R or gamma.
///
/// Families:
///   Linear(c):      s -> c*s
///   XLog1OverX(c):  s -> c*s*log(1/s), 0 at s = 0, held at c/e for s >= 1/e
///   XLogXPlus1:     s -> 1 for s <= 1, s*log(s) + 1 above
///   Custom:         any user callable, tagged with a label
class Modulus {
 public:
  static Modulus Linear(double c);
  static Modulus XLog1OverX(double c);
  static Modulus XLogXPlus1();
  static Modulus Custom(std::string label, std::function<double(double)> fn);

  double operator()(double s) const;

  ModulusKind kind() const { return kind_; }
  double coefficient() const { return c_; }
  std::string describe() const;

 private:
  Modulus(ModulusKind kind, double c, std::string label,
          std::function<double(double)> fn);

  ModulusKind kind_;
  double c_;
  std::string label_;
  std::function<double(double)> fn_;
};

}  // namespace ldp
