#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mpthermo/maxplus.hpp"

namespace mpt {

class Rng;

/// Max-plus IFS over an opaque finite point set {0..|P|-1}. Map `nu` sends
/// point mu to maps[nu][mu] with weight weights[nu][mu] <= 0, and for every
/// point the best weight over the maps is 0.
class MpIFSSystem {
 public:
  MpIFSSystem(std::size_t points, std::vector<std::vector<std::size_t>> maps,
              std::vector<std::vector<double>> weights);

  std::size_t points() const { return points_; }
  std::size_t maps() const { return maps_.size(); }
  std::size_t image(std::size_t nu, std::size_t mu) const { return maps_[nu][mu]; }
  double weight(std::size_t nu, std::size_t mu) const { return weights_[nu][mu]; }
  const std::vector<std::vector<double>>& weights() const { return weights_; }

 private:
  std::size_t points_;
  std::vector<std::vector<std::size_t>> maps_;
  std::vector<std::vector<double>> weights_;
};

/// One map per point, each constant onto its own index: phi_nu(mu) = nu.
MpIFSSystem constant_map_system(std::vector<std::vector<double>> weights);

/// Random normalized system with general maps.
MpIFSSystem random_mpifs(std::size_t points, std::size_t maps, Rng& rng);

using PointTable = std::vector<double>;
using PointDensity = std::vector<MaxPlusValue>;

/// (Lf)(mu) = max_nu q_nu(mu) + f(phi_nu(mu)).
PointTable mpifs_ruelle(const PointTable& f, const MpIFSSystem& sys);

/// (L lambda)(mu) = max over (nu, eta) with phi_nu(eta) = mu of q_nu(eta) + lambda(eta).
PointDensity mpifs_transfer(const PointDensity& lambda, const MpIFSSystem& sys);

/// Pressure with density lambda: f -> max_mu lambda(mu) + f(mu).
MaxPlusValue pressure_of(const PointDensity& lambda, const PointTable& f);

/// M(l)(f) = max_nu l(q_nu + f o phi_nu), with l given by its density.
MaxPlusValue markov_apply(const PointDensity& lambda, const PointTable& f, const MpIFSSystem& sys);

struct InvarianceReport {
  double markov_residual = 0.0;    // M(l) = l on the test family
  double transfer_residual = 0.0;  // L lambda = lambda pointwise
  double ruelle_residual = 0.0;    // l(L f) = l(f) on the test family
  bool markov_fixed = false;
  bool transfer_fixed = false;
  bool ruelle_fixed = false;

  bool agree() const { return markov_fixed == transfer_fixed && transfer_fixed == ruelle_fixed; }
  bool all_hold() const { return markov_fixed && transfer_fixed && ruelle_fixed; }
};

/// The test family is extended by peak functions at every point, deep enough
/// to separate densities that differ anywhere.
InvarianceReport mpifs_invariance_check(const PointDensity& lambda, const MpIFSSystem& sys,
                                        const std::vector<PointTable>& f_family, double tol = 1e-12);

struct ValueIteration {
  PointDensity density;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Iterates the transfer operator from lambda = 0 until it stops changing.
/// Converges for constant-map systems; with general maps, points fed only by
/// negative cycles drift down without bound.
ValueIteration mpifs_value_iteration(const MpIFSSystem& sys, std::size_t max_iterations = 0);

/// Limit of the iteration above in R_max: 0 on points lying on zero-weight
/// cycles, the best path weight from those points elsewhere, bottom when no
/// such path exists.
PointDensity mpifs_limit_density(const MpIFSSystem& sys);

struct InverseSolution {
  MpIFSSystem system;
  /// max_mu |h(mu) - max_eta [q_mu(eta) + h(eta)]|.
  double fixed_point_residual = 0.0;
  /// max_mu |max_nu q_nu(mu)|: per-point weight normalization.
  double pointwise_normalization = 0.0;
  /// |max over all (nu, eta) of q_nu(eta)|: normalization across the family.
  double family_normalization = 0.0;
};

/// q_mu(eta) = h(mu) for h <= 0 with max h = 0.
InverseSolution inverse_problem_solve(const PointTable& h);

}  // namespace mpt
