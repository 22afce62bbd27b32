#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mpthermo/error.hpp"

namespace mpt {

class Rng;

/// Full shift on {1..d}^N with the ultrametric d_gamma(x, y) = gamma^i(x, y),
/// where i is the first (0-based) index at which x and y differ.
///
/// Symbols are stored 0-based: code symbol s is the letter s+1 of {1..d}.
class ShiftSpace {
 public:
  /// Requires d >= 2 and 0 < gamma < 1/(d+1).
  ShiftSpace(std::size_t alphabet, double gamma);

  std::size_t alphabet() const { return alphabet_; }
  double gamma() const { return gamma_; }
  /// Contraction rate (d+1) gamma of every dual transfer operator.
  double contraction_rate() const { return static_cast<double>(alphabet_ + 1) * gamma_; }
  /// d^n, checked against the dense table cap.
  std::size_t words(std::size_t length) const;

  friend bool operator==(const ShiftSpace&, const ShiftSpace&) = default;

 private:
  std::size_t alphabet_;
  double gamma_;
};

/// Largest table (number of words) any dense function or measure may hold.
inline constexpr std::size_t kMaxTableSize = std::size_t{1} << 24;

/// Finite word over the alphabet; encoded in base d with the first symbol most
/// significant, so table order is lexicographic word order.
class Word {
 public:
  Word() = default;
  Word(std::vector<int> symbols, std::size_t alphabet);

  static Word decode(std::size_t index, std::size_t length, std::size_t alphabet);

  std::size_t length() const { return symbols_.size(); }
  std::size_t alphabet() const { return alphabet_; }
  const std::vector<int>& symbols() const { return symbols_; }
  int operator[](std::size_t i) const { return symbols_[i]; }
  std::size_t encode() const;

 private:
  std::vector<int> symbols_;
  std::size_t alphabet_ = 2;
};

/// First index at which two encoded words of length `length` differ, or
/// `length` if they are equal.
std::size_t first_difference(std::size_t u, std::size_t v, std::size_t length, std::size_t alphabet);

double word_metric(const Word& u, const Word& v, const ShiftSpace& space);

/// Function on the shift depending only on the first `depth` coordinates.
class DepthKFunction {
 public:
  DepthKFunction(std::size_t alphabet, std::size_t depth, std::vector<double> values);
  static DepthKFunction constant(std::size_t alphabet, double c);

  std::size_t alphabet() const { return alphabet_; }
  std::size_t depth() const { return depth_; }
  const std::vector<double>& values() const { return values_; }
  double operator[](std::size_t word) const { return values_[word]; }

  /// Value on a word of length >= depth (only the prefix is read).
  double at(std::span<const int> word) const;
  /// Value on the word encoded at `length` >= depth.
  double at_encoded(std::size_t word, std::size_t length) const;

  double sup() const;
  double inf() const;
  double sup_norm() const;

 private:
  std::size_t alphabet_;
  std::size_t depth_;
  std::vector<double> values_;
};

/// max over distinct words of |f(u) - f(v)| / gamma^i(u, v).
double lipschitz_constant(const DepthKFunction& f, const ShiftSpace& space);

/// Normalized weight function of a transfer operator:
/// values in [0,1], sum over the first symbol equal to 1, Lip <= 1.
class Jacobian {
 public:
  /// Validates normalization (1e-12) and the Lipschitz bound (1e-9 slack).
  Jacobian(DepthKFunction values, const ShiftSpace& space);

  const DepthKFunction& function() const { return values_; }
  std::size_t depth() const { return values_.depth(); }
  std::size_t alphabet() const { return values_.alphabet(); }
  double operator[](std::size_t word) const { return values_[word]; }
  double lipschitz() const { return lipschitz_; }

 private:
  DepthKFunction values_;
  double lipschitz_;
};

/// J_p: depth-1 Jacobian (p, 1-p) on the two-letter shift.
Jacobian make_bernoulli_jacobian(double p, const ShiftSpace& space);
/// Depth-1 Jacobian with first-symbol weights `probs` (any alphabet).
Jacobian make_product_jacobian(std::span<const double> probs, const ShiftSpace& space);
/// Random Jacobian of the given depth with Lip <= 1 (blended toward a
/// position-independent row until the bound holds).
Jacobian random_jacobian(const ShiftSpace& space, std::size_t depth, Rng& rng);

double sup_distance(const Jacobian& a, const Jacobian& b);

/// Probability on the shift given on all cylinders of a fixed depth.
class CylinderMeasure {
 public:
  /// Validates nonnegativity and total mass 1 within 1e-12.
  CylinderMeasure(ShiftSpace space, std::size_t depth, std::vector<double> masses);

  static CylinderMeasure trivial(const ShiftSpace& space);
  static CylinderMeasure uniform(const ShiftSpace& space, std::size_t depth);
  /// Point mass on the cylinder of `word`.
  static CylinderMeasure point_mass(const ShiftSpace& space, const Word& word);
  /// Product measure P_{p_1}(x_1) ... P_{p_n}(x_n), one probability row per coordinate.
  static CylinderMeasure product(const ShiftSpace& space, const std::vector<std::vector<double>>& rows);
  static CylinderMeasure random(const ShiftSpace& space, std::size_t depth, Rng& rng);

  const ShiftSpace& space() const { return space_; }
  std::size_t depth() const { return depth_; }
  const std::vector<double>& masses() const { return masses_; }
  double operator[](std::size_t word) const { return masses_[word]; }

  /// Mass of the cylinder of a prefix of length <= depth.
  double cylinder(const Word& prefix) const;
  /// Splits each cylinder uniformly over the next symbol.
  CylinderMeasure refine() const;
  /// Marginal on the first `depth` coordinates.
  CylinderMeasure coarsen(std::size_t depth) const;
  /// Uniform refinement or coarsening to the requested depth.
  CylinderMeasure at_depth(std::size_t depth) const;
  /// integral of f d mu for f of depth <= depth().
  double integrate(const DepthKFunction& f) const;

  friend bool operator==(const CylinderMeasure&, const CylinderMeasure&) = default;

 private:
  ShiftSpace space_;
  std::size_t depth_;
  std::vector<double> masses_;
};

/// L_J f(x) = sum_a J(a x) f(a x); tabulated at depth max(k_f, k_J) - 1.
DepthKFunction transfer_apply(const Jacobian& J, const DepthKFunction& f);

/// L_J^* mu: nu[a w] = J(a w) mu[w]; depth grows by one.
/// Requires depth(J) <= depth(mu) + 1.
CylinderMeasure dual_apply(const Jacobian& J, const CylinderMeasure& mu);

/// sigma^# mu: nu[w] = sum_a mu[a w]; depth shrinks by one.
CylinderMeasure pushforward_apply(const CylinderMeasure& mu);

struct ComposeResult {
  CylinderMeasure measure;
  /// W1 between successive prefixes rho_k and rho_{k+1}, rho_k = L*_{J_1}...L*_{J_k}(nu0).
  std::vector<double> gaps;
};

/// L*_{J_1} o ... o L*_{J_n}(nu0), J_n applied first.
ComposeResult compose_duals(std::span<const Jacobian> js, const CylinderMeasure& nu0);

}  // namespace mpt
