#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "mpthermo/maxplus.hpp"

namespace mpt {

/// Point of the probability simplex over a finite alphabet {1..d}.
class ProbVector {
 public:
  /// Validates: every mass in [0,1] and the total within 1e-12 of 1.
  explicit ProbVector(std::vector<double> masses);

  static ProbVector uniform(std::size_t d);
  static ProbVector point_mass(std::size_t d, std::size_t at);

  std::size_t size() const { return masses_.size(); }
  double operator[](std::size_t i) const { return masses_[i]; }
  const std::vector<double>& masses() const { return masses_; }
  std::span<const double> span() const { return masses_; }

  friend bool operator==(const ProbVector&, const ProbVector&) = default;

 private:
  std::vector<double> masses_;
};

double linf_distance(const ProbVector& a, const ProbVector& b);

/// -sum p_j log p_j with 0 log 0 = 0 (masses below 1e-15 count as zero).
double shannon_entropy(const ProbVector& p);

/// Numerically stable log(sum exp(x_j)).
double log_sum_exp(std::span<const double> x);

/// A function on X = {1..d}, i.e. a level-1 potential.
struct Level1Observable {
  std::vector<double> coefficients;

  double integrate(const ProbVector& mu) const;
  Level1Observable shifted(double c) const;
};

using Level2Observable = std::function<double(const ProbVector&)>;
using Level2Density = std::function<MaxPlusValue(const ProbVector&)>;

/// Canonical inclusion j: phi -> (mu -> integral of phi d mu).
Level2Observable inclusion_j(Level1Observable phi);

Level2Density shannon_density();
/// 0 at `at` (L-inf within 1e-12), bottom elsewhere.
Level2Density delta_density(ProbVector at);

/// Softmax of g: the unique equilibrium of Shannon + j(g).
ProbVector gibbs_solution(const Level1Observable& g);

/// Coarse lattice {k/m} on the simplex plus local refinement parameters.
struct SimplexGrid {
  std::size_t dimension = 2;
  std::size_t resolution = 200;
  std::size_t refine_rounds = 6;
  double shrink = 0.2;
  std::size_t top_k = 4;
  std::size_t refine_radius = 5;

  void validate() const;
  /// Step of the final refinement lattice.
  double final_step() const;
  /// Enumerates every lattice point; intended for small grids.
  std::vector<ProbVector> points() const;
};

/// Maximum value and the (possibly non-convex) set of near-maximizers.
struct EquilibriumSet {
  double value = 0.0;
  std::vector<ProbVector> equilibria;
};

/// Global lattice scan, then local refinement around the best local maxima.
/// `objective` may return -inf to exclude a point.
EquilibriumSet maximize_on_simplex(const std::function<double(const ProbVector&)>& objective,
                                   const SimplexGrid& grid, double tol = 1e-9);

/// l_h(g) = max over the simplex of h(p) + g(p), with its equilibrium states.
EquilibriumSet level2_pressure(const Level2Density& h, const Level2Observable& g,
                               const SimplexGrid& grid, double tol = 1e-9);

/// Gamma_l(phi) = l(j(phi)).
double convex_pressure_gamma(const Level2Density& h, const Level1Observable& phi,
                             const SimplexGrid& grid);

/// Worst observed violations of monotonicity, translation invariance and
/// convexity of Gamma_l over random level-1 observables.
struct ConvexPressureReport {
  std::size_t trials = 0;
  double monotonicity_violation = 0.0;
  double translation_residual = 0.0;
  double convexity_violation = 0.0;

  double worst() const;
};

ConvexPressureReport pressure_axioms_C1C2C3(const Level2Density& h, const SimplexGrid& grid,
                                            std::size_t trials, std::uint64_t seed,
                                            double coefficient_scale = 2.0);

/// Minimum of a functional over a finite family, with the attaining index.
struct FamilyMinimum {
  double value = 0.0;
  std::size_t best_index = 0;
};

/// Upper approximation of the concave entropy: min over the family of
/// Gamma(phi) - integral of phi d mu.
FamilyMinimum entropy_recovery(const Level2Density& h, const ProbVector& mu,
                               const std::vector<Level1Observable>& phi_family,
                               const SimplexGrid& grid);

/// Coefficient lattice for entropy recovery. The last coefficient is pinned to 0
/// (translation invariance makes it redundant).
std::vector<Level1Observable> coefficient_grid_family(std::size_t d, double lo, double hi,
                                                      std::size_t steps);

/// min over the family of l(g) - g(mu).
FamilyMinimum concave_density_identity(const Level2Density& h, const ProbVector& mu,
                                       const std::vector<Level2Observable>& g_family,
                                       const SimplexGrid& grid);

/// g(p) = a p_1 + b (p_1 - c)^2 on the 1-D simplex (d = 2), for a, c on lattices
/// and b in {0, -curvatures...}.
std::vector<Level2Observable> affine_quadratic_family(double slope_lo, double slope_hi,
                                                      std::size_t slope_steps,
                                                      const std::vector<double>& curvatures,
                                                      std::size_t center_steps);

/// Concave envelope of a density on the 1-D simplex, from the upper convex hull
/// of its graph over a uniform grid in p_1.
class ConcaveEnvelope1D {
 public:
  ConcaveEnvelope1D(const Level2Density& h0, std::size_t grid_points);

  MaxPlusValue operator()(const ProbVector& p) const;
  Level2Density as_density() const;

  const std::vector<double>& hull_x() const { return hull_x_; }
  const std::vector<double>& hull_y() const { return hull_y_; }

 private:
  std::vector<double> hull_x_;
  std::vector<double> hull_y_;
};

/// Shift-invariant 1-step Markov measure on {1..d}^N (Bernoulli when all rows agree).
struct MarkovMeasure {
  std::vector<ProbVector> rows;
  ProbVector stationary = ProbVector::uniform(1);

  static MarkovMeasure bernoulli(const ProbVector& p);
  static MarkovMeasure from_rows(std::vector<ProbVector> rows);

  std::size_t alphabet() const { return rows.size(); }
  /// Kolmogorov-Sinai entropy -sum_i pi_i sum_j P_ij log P_ij.
  double ks_entropy() const;
  double integrate(const Level1Observable& a) const;
};

/// Stationary vector of a row-stochastic matrix; Cesaro limit from the uniform
/// start when the chain is reducible.
ProbVector stationary_distribution(const std::vector<ProbVector>& rows);

enum class MeasureFamily { Bernoulli, Markov };

struct NonlinearSpec {
  std::function<double(double)> F;
  Level1Observable A;
};

struct NonlinearResult {
  double value = 0.0;
  std::vector<MarkovMeasure> maximizers;
};

/// max over the family of h_KS(mu) + F(integral of A d mu).
NonlinearResult nonlinear_pressure(const NonlinearSpec& spec, MeasureFamily family,
                                   const SimplexGrid& grid, double tol = 1e-9);

}  // namespace mpt
