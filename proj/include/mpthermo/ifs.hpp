#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "mpthermo/maxplus.hpp"
#include "mpthermo/shift.hpp"
#include "mpthermo/simplex.hpp"

namespace mpt {

/// Finite family of Jacobians with max-plus weights, normalized so max q = 0.
class WeightedJacobianFamily {
 public:
  WeightedJacobianFamily(ShiftSpace space, std::vector<Jacobian> jacobians, std::vector<double> weights);

  const ShiftSpace& space() const { return space_; }
  std::size_t size() const { return jacobians_.size(); }
  const Jacobian& jacobian(std::size_t i) const { return jacobians_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t max_jacobian_depth() const;

 private:
  ShiftSpace space_;
  std::vector<Jacobian> jacobians_;
  std::vector<double> weights_;
};

struct AttractorLeaf {
  /// Indices into the family; the first letter is the outermost operator.
  Word word;
  CylinderMeasure measure;
  double weight = 0.0;
};

struct AttractorCluster {
  std::size_t representative = 0;  // index of the first leaf in word order
  std::vector<std::size_t> members;
  double weight = 0.0;
  double diameter = 0.0;  // max W1 from the representative
};

struct AttractorSample {
  std::vector<AttractorLeaf> leaves;
  std::vector<AttractorCluster> clusters;
  double epsilon = 0.0;
  std::size_t N = 0;
  double rate = 0.0;
  std::size_t measure_depth = 0;
  /// Branches whose cumulative weight fell below this were dropped (-inf: none).
  double weight_floor = -std::numeric_limits<double>::infinity();
  std::size_t pruned = 0;
};

struct AttractorOptions {
  /// Merge tolerance; defaults to max(r^N, gamma^depth).
  std::optional<double> epsilon;
  /// Leaf measures are coarsened to this depth; defaults to the largest depth
  /// <= N + depth(nu0) whose table fits kAttractorTableCap.
  std::optional<std::size_t> measure_depth;
  double weight_floor = -std::numeric_limits<double>::infinity();
  /// Upper limit on m^N leaves and on leaves times table entries.
  std::size_t leaf_budget = std::size_t{1} << 20;
  std::size_t entry_budget = std::size_t{1} << 26;
  bool merge = true;
};

inline constexpr std::size_t kAttractorTableCap = 4096;

AttractorSample attractor_build(const WeightedJacobianFamily& fam, std::size_t N, const CylinderMeasure& nu0,
                                const AttractorOptions& options = {});

/// Density entropy at a measure: the best weight over leaves within epsilon,
/// with the truncated upper bound over leaves within epsilon + r^N/(1-r).
struct DensityEstimate {
  MaxPlusValue value;
  MaxPlusValue upper;
  double drift = 0.0;
  std::size_t matches = 0;
};

DensityEstimate density_entropy_estimate(const AttractorSample& sample, const CylinderMeasure& mu);

using MeasureObservable = std::function<double(const CylinderMeasure&)>;

struct InvariantPressure {
  double value = 0.0;
  /// L_g r^N / (1-r).
  double error_bound = 0.0;
  /// |max_J [q_J + l(g o L_J^*)] - l(g)| on the sample, i.e. one more level.
  double fixed_point_residual = 0.0;
  Word argmax;
};

InvariantPressure invariant_pressure_solve(const WeightedJacobianFamily& fam, const MeasureObservable& g,
                                           double g_lipschitz, std::size_t N, const CylinderMeasure& nu0,
                                           const AttractorOptions& options = {});

/// Leaf tables compared against compose_duals run separately for every word.
struct BruteForceComparison {
  std::size_t leaves = 0;
  double max_mass_difference = 0.0;
  double max_weight_difference = 0.0;
  bool bitwise_equal = true;
};

BruteForceComparison compare_with_brute_force(const WeightedJacobianFamily& fam, std::size_t N,
                                              const CylinderMeasure& nu0, const AttractorSample& sample);

/// Pushforward of a probability vector under a map on the alphabet.
ProbVector pushforward(const ProbVector& p, const std::vector<std::size_t>& T);

struct PushforwardInvarianceReport {
  /// max residual between h and its pushed density sup over T-fibers.
  double density_residual = 0.0;
  /// max over the observable family of |l(g o T) - l(g)|.
  double observable_residual = 0.0;
  bool invariant = false;
  std::optional<std::size_t> witness;  // index of a failing observable
};

/// Grid points must map into the grid (L-inf 1e-12). Observables are tables on
/// the grid; the family is extended by peak functions at every grid point.
PushforwardInvarianceReport pushforward_invariance_check(const DensitySample<ProbVector>& h,
                                                         const std::vector<std::size_t>& T,
                                                         const std::vector<std::vector<double>>& observables,
                                                         double tol = 1e-9);

}  // namespace mpt
