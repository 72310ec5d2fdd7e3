#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>

namespace evtrig {

/// A class-K-infinity comparison function s -> r on [0, inf).
///
/// Linear and power forms are closed-form (value, inverse, derivative). Custom
/// functions invert by bracketing and bisection, and differentiate by central
/// differences unless the caller provides those pieces.
class ClassKFunction {
 public:
  ClassKFunction();  // identity

  static ClassKFunction linear(double gain);
  static ClassKFunction power(double coeff, double exponent);
  static ClassKFunction custom(std::string name, std::function<double(double)> value,
                               std::function<double(double)> inverse = {},
                               std::function<double(double)> derivative = {});
  /// s -> min{a(s), b(s)}.
  static ClassKFunction pointwise_min(const ClassKFunction& a, const ClassKFunction& b);

  double operator()(double s) const;
  double inverse(double r) const;
  double derivative(double s) const;

  /// Gain c when the function is s -> c s.
  std::optional<double> linear_gain() const;
  /// (coeff, exponent) when the function is s -> coeff s^exponent.
  std::optional<std::pair<double, double>> power_form() const;

  /// s -> c * f(s).
  ClassKFunction scaled(double c) const;

  const std::string& name() const { return name_; }

 private:
  enum class Kind { power, custom };
  Kind kind_ = Kind::power;
  double coeff_ = 1.0;
  double exponent_ = 1.0;
  std::string name_;
  std::shared_ptr<const std::function<double(double)>> value_;
  std::shared_ptr<const std::function<double(double)>> inverse_;
  std::shared_ptr<const std::function<double(double)>> derivative_;
};

}  // namespace evtrig
