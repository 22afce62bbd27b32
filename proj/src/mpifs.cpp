#include "mpthermo/mpifs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mpthermo/rng.hpp"

namespace mpt {

MpIFSSystem::MpIFSSystem(std::size_t points, std::vector<std::vector<std::size_t>> maps,
                         std::vector<std::vector<double>> weights)
    : points_(points), maps_(std::move(maps)), weights_(std::move(weights)) {
  require(points_ >= 1, "mpIFS needs at least one point");
  require(!maps_.empty(), "mpIFS needs at least one map");
  require(maps_.size() == weights_.size(), "one weight table per map required");
  for (std::size_t nu = 0; nu < maps_.size(); ++nu) {
    require(maps_[nu].size() == points_ && weights_[nu].size() == points_, "map tables must cover every point");
    for (std::size_t mu = 0; mu < points_; ++mu) {
      require(maps_[nu][mu] < points_, "map image out of range");
      require(std::isfinite(weights_[nu][mu]) && weights_[nu][mu] <= 0.0, "mpIFS weights must be finite and <= 0");
    }
  }
  for (std::size_t mu = 0; mu < points_; ++mu) {
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t nu = 0; nu < maps_.size(); ++nu) top = std::max(top, weights_[nu][mu]);
    require(top == 0.0, "mpIFS weights at point " + std::to_string(mu) + " do not attain 0");
  }
}

MpIFSSystem constant_map_system(std::vector<std::vector<double>> weights) {
  const std::size_t n = weights.size();
  std::vector<std::vector<std::size_t>> maps(n, std::vector<std::size_t>(n));
  for (std::size_t nu = 0; nu < n; ++nu) std::fill(maps[nu].begin(), maps[nu].end(), nu);
  return MpIFSSystem(n, std::move(maps), std::move(weights));
}

MpIFSSystem random_mpifs(std::size_t points, std::size_t maps, Rng& rng) {
  std::vector<std::vector<std::size_t>> phi(maps, std::vector<std::size_t>(points));
  std::vector<std::vector<double>> q(maps, std::vector<double>(points));
  for (std::size_t nu = 0; nu < maps; ++nu) {
    for (std::size_t mu = 0; mu < points; ++mu) {
      phi[nu][mu] = rng.index(points);
      q[nu][mu] = -rng.uniform(0.0, 3.0);
    }
  }
  for (std::size_t mu = 0; mu < points; ++mu) q[rng.index(maps)][mu] = 0.0;
  return MpIFSSystem(points, std::move(phi), std::move(q));
}

PointTable mpifs_ruelle(const PointTable& f, const MpIFSSystem& sys) {
  require(f.size() == sys.points(), "observable table must cover every point");
  PointTable out(sys.points(), -std::numeric_limits<double>::infinity());
  for (std::size_t mu = 0; mu < sys.points(); ++mu) {
    for (std::size_t nu = 0; nu < sys.maps(); ++nu) {
      out[mu] = std::max(out[mu], sys.weight(nu, mu) + f[sys.image(nu, mu)]);
    }
  }
  return out;
}

PointDensity mpifs_transfer(const PointDensity& lambda, const MpIFSSystem& sys) {
  require(lambda.size() == sys.points(), "density table must cover every point");
  PointDensity out(sys.points());
  for (std::size_t eta = 0; eta < sys.points(); ++eta) {
    if (lambda[eta].is_bottom()) continue;
    for (std::size_t nu = 0; nu < sys.maps(); ++nu) {
      auto& slot = out[sys.image(nu, eta)];
      slot = oplus(slot, odot(MaxPlusValue(sys.weight(nu, eta)), lambda[eta]));
    }
  }
  return out;
}

MaxPlusValue pressure_of(const PointDensity& lambda, const PointTable& f) {
  require(lambda.size() == f.size(), "density and observable sizes differ");
  MaxPlusValue out;
  for (std::size_t mu = 0; mu < f.size(); ++mu) out = oplus(out, odot(lambda[mu], MaxPlusValue(f[mu])));
  return out;
}

MaxPlusValue markov_apply(const PointDensity& lambda, const PointTable& f, const MpIFSSystem& sys) {
  require(f.size() == sys.points(), "observable table must cover every point");
  MaxPlusValue out;
  PointTable g(sys.points());
  for (std::size_t nu = 0; nu < sys.maps(); ++nu) {
    for (std::size_t mu = 0; mu < sys.points(); ++mu) g[mu] = sys.weight(nu, mu) + f[sys.image(nu, mu)];
    out = oplus(out, pressure_of(lambda, g));
  }
  return out;
}

InvarianceReport mpifs_invariance_check(const PointDensity& lambda, const MpIFSSystem& sys,
                                        const std::vector<PointTable>& f_family, double tol) {
  const PointDensity image = mpifs_transfer(lambda, sys);
  InvarianceReport report;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t mu = 0; mu < sys.points(); ++mu) {
    report.transfer_residual = std::max(report.transfer_residual, residual(image[mu], lambda[mu]));
    for (const auto& v : {image[mu], lambda[mu]}) {
      if (v.is_finite()) {
        lo = std::min(lo, v.value());
        hi = std::max(hi, v.value());
      }
    }
  }
  double spread = hi >= lo ? hi - lo : 0.0;
  for (const auto& f : f_family) {
    for (double x : f) spread = std::max(spread, std::abs(x));
  }
  const double K = 2.0 * spread + 10.0;
  std::vector<PointTable> family = f_family;
  for (std::size_t mu = 0; mu < sys.points(); ++mu) {
    PointTable peak(sys.points(), -K);
    peak[mu] = 0.0;
    family.push_back(std::move(peak));
  }
  for (const auto& f : family) {
    const MaxPlusValue base = pressure_of(lambda, f);
    report.markov_residual = std::max(report.markov_residual, residual(markov_apply(lambda, f, sys), base));
    report.ruelle_residual = std::max(report.ruelle_residual, residual(pressure_of(lambda, mpifs_ruelle(f, sys)), base));
  }
  report.markov_fixed = report.markov_residual <= tol;
  report.transfer_fixed = report.transfer_residual <= tol;
  report.ruelle_fixed = report.ruelle_residual <= tol;
  return report;
}

ValueIteration mpifs_value_iteration(const MpIFSSystem& sys, std::size_t max_iterations) {
  if (max_iterations == 0) max_iterations = 20 * sys.points() + 100;
  ValueIteration out;
  out.density.assign(sys.points(), MaxPlusValue::unit());
  for (; out.iterations < max_iterations; ++out.iterations) {
    PointDensity next = mpifs_transfer(out.density, sys);
    if (next == out.density) {
      out.converged = true;
      break;
    }
    out.density = std::move(next);
  }
  return out;
}

PointDensity mpifs_limit_density(const MpIFSSystem& sys) {
  const std::size_t n = sys.points();
  std::vector<std::vector<std::size_t>> zero_edges(n);
  for (std::size_t eta = 0; eta < n; ++eta) {
    for (std::size_t nu = 0; nu < sys.maps(); ++nu) {
      if (sys.weight(nu, eta) == 0.0) zero_edges[eta].push_back(sys.image(nu, eta));
    }
  }
  PointDensity out(n);
  std::vector<char> seen(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::fill(seen.begin(), seen.end(), 0);
    std::vector<std::size_t> stack(zero_edges[c]);
    while (!stack.empty() && out[c].is_bottom()) {
      const std::size_t x = stack.back();
      stack.pop_back();
      if (x == c) out[c] = MaxPlusValue::unit();
      if (seen[x]) continue;
      seen[x] = 1;
      stack.insert(stack.end(), zero_edges[x].begin(), zero_edges[x].end());
    }
  }
  // weights are <= 0, so longest paths settle within n rounds
  for (std::size_t round = 0; round < n; ++round) {
    const PointDensity next = mpifs_transfer(out, sys);
    bool changed = false;
    for (std::size_t mu = 0; mu < n; ++mu) {
      const MaxPlusValue v = oplus(out[mu], next[mu]);
      if (!(v == out[mu])) {
        out[mu] = v;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return out;
}

InverseSolution inverse_problem_solve(const PointTable& h) {
  require(!h.empty(), "inverse problem needs a nonempty table");
  double top = -std::numeric_limits<double>::infinity();
  for (double v : h) {
    require(std::isfinite(v) && v <= 0.0, "inverse problem requires finite h <= 0");
    top = std::max(top, v);
  }
  require(top == 0.0, "inverse problem requires max h = 0, got " + std::to_string(top));
  const std::size_t n = h.size();
  std::vector<std::vector<double>> q(n);
  for (std::size_t mu = 0; mu < n; ++mu) q[mu].assign(n, h[mu]);
  InverseSolution out{constant_map_system(q), 0.0, 0.0, 0.0};
  double family_top = -std::numeric_limits<double>::infinity();
  for (std::size_t mu = 0; mu < n; ++mu) {
    double best = -std::numeric_limits<double>::infinity();
    double point_top = -std::numeric_limits<double>::infinity();
    for (std::size_t eta = 0; eta < n; ++eta) {
      best = std::max(best, q[mu][eta] + h[eta]);
      point_top = std::max(point_top, q[eta][mu]);
      family_top = std::max(family_top, q[mu][eta]);
    }
    out.fixed_point_residual = std::max(out.fixed_point_residual, std::abs(h[mu] - best));
    out.pointwise_normalization = std::max(out.pointwise_normalization, std::abs(point_top));
  }
  out.family_normalization = std::abs(family_top);
  return out;
}

}  // namespace mpt
