#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mpthermo/shift.hpp"

namespace mpt {

/// Depth-n cylinder tree whose leaf path distance is the ultrametric gamma^L.
/// Edge from level j to level j+1 carries weight (gamma^j - gamma^{j+1})/2,
/// except the leaf level which carries gamma^{n-1}/2.
struct PrefixTreeMetric {
  std::size_t alphabet;
  double gamma;
  std::size_t depth;
  std::vector<double> edge_weights;

  static PrefixTreeMetric build(const ShiftSpace& space, std::size_t depth);
  /// Path length between two leaves whose words first differ at `index`.
  double leaf_distance(std::size_t index) const;
};

enum class TransportMethod { TreeClosedForm, LpOracle };

std::string to_string(TransportMethod method);

struct TransportReport {
  double value = 0.0;
  TransportMethod method = TransportMethod::TreeClosedForm;
  /// Distance to the continuous W1 is at most gamma^depth for measures not
  /// measurable at this depth.
  double truncation_error = 0.0;
  /// Kantorovich potential with values in [0,1] and Lipschitz constant <= 1.
  std::optional<DepthKFunction> potential;
  /// mu(f) - nu(f) for the potential; equals `value` up to the duality gap.
  double dual_value = 0.0;
};

/// Closed-form W1 on the cylinder tree; linear in the table size.
double w1_tree(const CylinderMeasure& mu, const CylinderMeasure& nu);
TransportReport w1_tree_report(const CylinderMeasure& mu, const CylinderMeasure& nu);

/// Largest table the flow oracle accepts.
inline constexpr std::size_t kLpOracleMaxWords = 1024;

/// Exact transportation problem by successive shortest paths, with a dual
/// potential recovered from the final node prices.
TransportReport w1_lp_oracle(const CylinderMeasure& mu, const CylinderMeasure& nu);

struct ContractionReport {
  double before = 0.0;
  double after = 0.0;
  double ratio = 0.0;
  double bound = 0.0;
  bool holds(double tol = 1e-10) const { return ratio <= bound + tol; }
};

/// W1(L_J^* mu, L_J^* nu) / W1(mu, nu) against the rate (d+1) gamma.
ContractionReport contraction_check(const Jacobian& J, const CylinderMeasure& mu, const CylinderMeasure& nu);

struct BoundReport {
  double value = 0.0;
  double bound = 0.0;
  bool holds(double tol = 1e-10) const { return value <= bound + tol; }
};

/// W1(L_{J1}^* mu, L_{J2}^* mu) against d * ||J1 - J2||_inf.
BoundReport jacobian_perturbation_check(const Jacobian& J1, const Jacobian& J2, const CylinderMeasure& mu);

/// W1(L_{J1}^* mu1, L_{J2}^* mu2) against r W1(mu1, mu2) + d ||J1 - J2||_inf.
BoundReport joint_contraction_check(const Jacobian& J1, const Jacobian& J2, const CylinderMeasure& mu1,
                                    const CylinderMeasure& mu2);

/// Randomized sweep over the three contraction bounds.
struct ContractionTrials {
  std::size_t trials = 0;
  double max_ratio = 0.0;
  double rate = 0.0;
  std::size_t contraction_violations = 0;
  std::size_t perturbation_violations = 0;
  std::size_t joint_violations = 0;
  double worst_perturbation_slack = 0.0;
  double worst_joint_slack = 0.0;

  std::size_t violations() const { return contraction_violations + perturbation_violations + joint_violations; }
};

ContractionTrials run_contraction_trials(const ShiftSpace& space, std::size_t depth, std::size_t trials,
                                         std::uint64_t seed);

}  // namespace mpt
