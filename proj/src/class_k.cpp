#include "evtrig/class_k.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "evtrig/errors.hpp"

namespace evtrig {

namespace {

std::string fmt_num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

double bisect_inverse(const std::function<double(double)>& f, double r) {
  if (r <= 0.0) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  int grow = 0;
  while (f(hi) < r) {
    lo = hi;
    hi *= 2.0;
    if (++grow > 2000) throw InvalidArgument("class-K inverse: function does not reach target value");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < r ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

ClassKFunction::ClassKFunction() : name_("s") {}

ClassKFunction ClassKFunction::linear(double gain) { return power(gain, 1.0); }

ClassKFunction ClassKFunction::power(double coeff, double exponent) {
  if (!(coeff > 0.0) || !std::isfinite(coeff)) throw InvalidArgument("class-K: coefficient must be positive");
  if (!(exponent > 0.0) || !std::isfinite(exponent)) throw InvalidArgument("class-K: exponent must be positive");
  ClassKFunction f;
  f.kind_ = Kind::power;
  f.coeff_ = coeff;
  f.exponent_ = exponent;
  f.name_ = exponent == 1.0 ? fmt_num(coeff) + "*s" : fmt_num(coeff) + "*s^" + fmt_num(exponent);
  return f;
}

ClassKFunction ClassKFunction::custom(std::string name, std::function<double(double)> value,
                                      std::function<double(double)> inverse,
                                      std::function<double(double)> derivative) {
  if (!value) throw InvalidArgument("class-K: custom function needs a value map");
  ClassKFunction f;
  f.kind_ = Kind::custom;
  f.name_ = std::move(name);
  f.value_ = std::make_shared<const std::function<double(double)>>(std::move(value));
  if (inverse) f.inverse_ = std::make_shared<const std::function<double(double)>>(std::move(inverse));
  if (derivative) {
    f.derivative_ = std::make_shared<const std::function<double(double)>>(std::move(derivative));
  }
  return f;
}

ClassKFunction ClassKFunction::pointwise_min(const ClassKFunction& a, const ClassKFunction& b) {
  // Linear pairs stay linear.
  if (auto ga = a.linear_gain(), gb = b.linear_gain(); ga && gb) return linear(std::min(*ga, *gb));
  return custom(
      "min{" + a.name() + ", " + b.name() + "}",
      [a, b](double s) { return std::min(a(s), b(s)); },
      [a, b](double r) { return std::max(a.inverse(r), b.inverse(r)); },
      [a, b](double s) { return a(s) <= b(s) ? a.derivative(s) : b.derivative(s); });
}

double ClassKFunction::operator()(double s) const {
  if (kind_ == Kind::power) {
    if (exponent_ == 1.0) return coeff_ * s;
    if (exponent_ == 2.0) return coeff_ * (s * s);
    return coeff_ * std::pow(s, exponent_);
  }
  return (*value_)(s);
}

double ClassKFunction::inverse(double r) const {
  if (kind_ == Kind::power) {
    if (exponent_ == 1.0) return r / coeff_;
    if (exponent_ == 2.0) return std::sqrt(r / coeff_);
    return std::pow(r / coeff_, 1.0 / exponent_);
  }
  if (inverse_) return (*inverse_)(r);
  return bisect_inverse(*value_, r);
}

double ClassKFunction::derivative(double s) const {
  if (kind_ == Kind::power) {
    if (exponent_ == 1.0) return coeff_;
    return coeff_ * exponent_ * std::pow(s, exponent_ - 1.0);
  }
  if (derivative_) return (*derivative_)(s);
  const double step = 1e-6 * std::max(1.0, std::abs(s));
  const double lo = std::max(0.0, s - step);
  return ((*value_)(s + step) - (*value_)(lo)) / (s + step - lo);
}

std::optional<double> ClassKFunction::linear_gain() const {
  if (kind_ == Kind::power && exponent_ == 1.0) return coeff_;
  return std::nullopt;
}

std::optional<std::pair<double, double>> ClassKFunction::power_form() const {
  if (kind_ == Kind::power) return std::make_pair(coeff_, exponent_);
  return std::nullopt;
}

ClassKFunction ClassKFunction::scaled(double c) const {
  if (!(c > 0.0)) throw InvalidArgument("class-K: scale must be positive");
  if (kind_ == Kind::power) return power(c * coeff_, exponent_);
  auto self = *this;
  return custom(
      fmt_num(c) + "*(" + name_ + ")", [self, c](double s) { return c * self(s); },
      [self, c](double r) { return self.inverse(r / c); },
      [self, c](double s) { return c * self.derivative(s); });
}

}  // namespace evtrig
