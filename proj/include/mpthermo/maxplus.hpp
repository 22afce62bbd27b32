#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <iosfwd>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "mpthermo/error.hpp"

namespace mpt {

/// Element of R_max = R u {-inf}. Bottom is a tagged state: no finite double
/// ever stands in for it, so odot stays absorbing under any arithmetic.
class MaxPlusValue {
 public:
  /// Default-constructed value is bottom, the neutral element of oplus.
  constexpr MaxPlusValue() = default;

  /// Finite value. NaN and infinities are rejected; use bottom() or
  /// from_extended() for -inf.
  MaxPlusValue(double v) : finite_(true), value_(v) {  // NOLINT(google-explicit-constructor)
    require(std::isfinite(v), "MaxPlusValue requires a finite real, got " + std::to_string(v));
  }

  static constexpr MaxPlusValue bottom() { return MaxPlusValue{}; }
  static constexpr MaxPlusValue unit() { return MaxPlusValue{Finite{}, 0.0}; }

  /// Maps -inf to bottom and any finite double to itself.
  static MaxPlusValue from_extended(double v) {
    if (v == -std::numeric_limits<double>::infinity()) return bottom();
    return MaxPlusValue(v);
  }

  constexpr bool is_bottom() const { return !finite_; }
  constexpr bool is_finite() const { return finite_; }

  /// Finite payload; throws on bottom.
  double value() const {
    require(finite_, "bottom (-inf) has no finite value");
    return value_;
  }

  /// Extended-real view: bottom becomes -inf. Only for output and comparisons.
  constexpr double extended() const {
    return finite_ ? value_ : -std::numeric_limits<double>::infinity();
  }

  friend constexpr MaxPlusValue oplus(MaxPlusValue a, MaxPlusValue b) {
    if (!a.finite_) return b;
    if (!b.finite_) return a;
    return a.value_ >= b.value_ ? a : b;
  }

  friend constexpr MaxPlusValue odot(MaxPlusValue a, MaxPlusValue b) {
    if (!a.finite_ || !b.finite_) return bottom();
    return MaxPlusValue{Finite{}, a.value_ + b.value_};
  }

  friend constexpr bool operator==(MaxPlusValue a, MaxPlusValue b) {
    if (a.finite_ != b.finite_) return false;
    return !a.finite_ || a.value_ == b.value_;
  }

  friend constexpr std::partial_ordering operator<=>(MaxPlusValue a, MaxPlusValue b) {
    if (!a.finite_ && !b.finite_) return std::partial_ordering::equivalent;
    if (!a.finite_) return std::partial_ordering::less;
    if (!b.finite_) return std::partial_ordering::greater;
    return a.value_ <=> b.value_;
  }

 private:
  struct Finite {};
  constexpr MaxPlusValue(Finite, double v) : finite_(true), value_(v) {}

  bool finite_ = false;
  double value_ = 0.0;
};

std::ostream& operator<<(std::ostream& os, MaxPlusValue v);

/// |a - b| for finite pairs, 0 when both are bottom, +inf on a finite/bottom mismatch.
double residual(MaxPlusValue a, MaxPlusValue b);

/// Finite tabulation of a density entropy h: points -> R_max.
template <typename P>
class DensitySample {
 public:
  DensitySample() = default;
  DensitySample(std::vector<P> points, std::vector<MaxPlusValue> values)
      : points_(std::move(points)), values_(std::move(values)) {
    require(points_.size() == values_.size(), "density: points and values differ in length");
  }

  const std::vector<P>& points() const { return points_; }
  const std::vector<MaxPlusValue>& values() const { return values_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

  /// Max over values; bottom when the support is empty.
  MaxPlusValue supremum() const {
    MaxPlusValue out = MaxPlusValue::bottom();
    for (const auto& v : values_) out = oplus(out, v);
    return out;
  }

  bool has_support() const { return supremum().is_finite(); }

  bool is_normalized(double tol = 0.0) const {
    const auto s = supremum();
    return s.is_finite() && std::abs(s.value()) <= tol;
  }

  /// Copy shifted by -max so that the supremum is exactly 0.
  DensitySample normalized() const {
    const auto s = supremum();
    require(s.is_finite(), "density has empty support");
    std::vector<MaxPlusValue> shifted;
    shifted.reserve(values_.size());
    for (const auto& v : values_) shifted.push_back(v.is_bottom() ? v : MaxPlusValue(v.value() - s.value()));
    return DensitySample(points_, std::move(shifted));
  }

 private:
  std::vector<P> points_;
  std::vector<MaxPlusValue> values_;
};

/// Value of l(g) = max[g + h] and the indices within tolerance of the max.
struct PressureResult {
  MaxPlusValue value;
  std::vector<std::size_t> argmax;
};

/// Evaluates the idempotent pressure with density `density` on observable `g`.
/// Ties are kept: every point within `tol` of the maximum is an equilibrium.
template <typename P, typename Observable>
PressureResult pressure_eval(const DensitySample<P>& density, Observable&& g, double tol = 1e-9) {
  require(!density.empty(), "empty density");
  require(density.has_support(), "density has empty support");
  const auto& pts = density.points();
  const auto& h = density.values();
  std::vector<MaxPlusValue> scores(pts.size());
  MaxPlusValue best = MaxPlusValue::bottom();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (h[i].is_bottom()) continue;
    scores[i] = odot(MaxPlusValue(static_cast<double>(g(pts[i]))), h[i]);
    best = oplus(best, scores[i]);
  }
  PressureResult out{best, {}};
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (scores[i].is_finite() && scores[i].value() >= best.value() - tol) out.argmax.push_back(i);
  }
  return out;
}

/// An idempotent pressure function represented by its density entropy.
template <typename P>
class IdempotentPressure {
 public:
  explicit IdempotentPressure(DensitySample<P> density) : density_(std::move(density)) {
    require(!density_.empty(), "empty density");
    require(density_.has_support(), "density has empty support");
  }

  const DensitySample<P>& density() const { return density_; }

  template <typename Observable>
  MaxPlusValue operator()(Observable&& g) const {
    return pressure_eval(density_, std::forward<Observable>(g)).value;
  }

  template <typename Observable>
  PressureResult evaluate(Observable&& g, double tol = 1e-9) const {
    return pressure_eval(density_, std::forward<Observable>(g), tol);
  }

 private:
  DensitySample<P> density_;
};

/// Residuals of the max-plus linearity axioms on one (g, g', c) triple.
struct AxiomReport {
  double homogeneity_residual = 0.0;  // l(c (.) g) vs c (.) l(g)
  double additivity_residual = 0.0;   // l(g (+) g') vs l(g) (+) l(g')
  double max_residual() const { return std::max(homogeneity_residual, additivity_residual); }
};

template <typename P, typename G1, typename G2>
AxiomReport axioms_check(const IdempotentPressure<P>& ell, G1&& g, G2&& g2, double c) {
  AxiomReport report;
  const auto shifted = [&](const P& x) { return c + g(x); };
  const auto pointwise_max = [&](const P& x) { return std::max<double>(g(x), g2(x)); };
  report.homogeneity_residual = residual(ell(shifted), odot(MaxPlusValue(c), ell(g)));
  report.additivity_residual = residual(ell(pointwise_max), oplus(ell(g), ell(g2)));
  return report;
}

}  // namespace mpt
