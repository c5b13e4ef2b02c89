#pragma once

namespace biochar {

/// Affine rate "constant" k(x) = scale * (slope * x / arg_ref + intercept).
///
/// The model's reaction coefficients are not true constants: the
/// mineralization rates grow with the microbe concentration and the
/// reproduction rate grows with the charcoal concentration.  `slope` and
/// `intercept` are the dimensionless pair (a, b), `scale` is the reference
/// constant K carrying the units, and `arg_ref` is the reference
/// concentration of the modulating species (1 when the argument is already
/// dimensionless).
struct RateLaw {
  double slope = 0.0;
  double intercept = 1.0;
  double scale = 1.0;
  double arg_ref = 1.0;

  double operator()(double x) const {
    return scale * (slope * (x / arg_ref) + intercept);
  }

  /// Value at zero argument, K*b.
  double at_zero() const { return scale * intercept; }

  /// dk/dx; the law is affine, so this is a constant.
  double derivative() const { return scale * slope / arg_ref; }

  bool operator==(const RateLaw&) const = default;
};

}  // namespace biochar
