#include "mpthermo/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mpthermo/rng.hpp"

namespace mpt {

PrefixTreeMetric PrefixTreeMetric::build(const ShiftSpace& space, std::size_t depth) {
  PrefixTreeMetric t{space.alphabet(), space.gamma(), depth, {}};
  for (std::size_t j = 0; j < depth; ++j) {
    const double gj = std::pow(space.gamma(), static_cast<double>(j));
    t.edge_weights.push_back(j + 1 < depth ? (gj - gj * space.gamma()) / 2.0 : gj / 2.0);
  }
  return t;
}

double PrefixTreeMetric::leaf_distance(std::size_t index) const {
  if (index >= depth) return 0.0;
  double s = 0.0;
  for (std::size_t j = index; j < depth; ++j) s += edge_weights[j];
  return 2.0 * s;
}

std::string to_string(TransportMethod method) {
  return method == TransportMethod::TreeClosedForm ? "tree-closed-form" : "LP-oracle";
}

namespace {

void require_comparable(const CylinderMeasure& mu, const CylinderMeasure& nu) {
  require(mu.space() == nu.space(), "W1: measures live on different shift spaces");
  require(mu.depth() == nu.depth(), "W1: measures have different depths; refine the shallower one first");
}

}  // namespace

double w1_tree(const CylinderMeasure& mu, const CylinderMeasure& nu) {
  require_comparable(mu, nu);
  const std::size_t n = mu.depth();
  if (n == 0) return 0.0;
  const auto tree = PrefixTreeMetric::build(mu.space(), n);
  const std::size_t d = mu.space().alphabet();
  std::vector<double> diff(mu.masses().size());
  for (std::size_t w = 0; w < diff.size(); ++w) diff[w] = mu[w] - nu[w];
  double total = 0.0;
  for (std::size_t level = n; level >= 1; --level) {
    double s = 0.0;
    for (double x : diff) s += std::abs(x);
    total += tree.edge_weights[level - 1] * s;
    if (level == 1) break;
    std::vector<double> up(diff.size() / d, 0.0);
    for (std::size_t w = 0; w < diff.size(); ++w) up[w / d] += diff[w];
    diff.swap(up);
  }
  return total;
}

TransportReport w1_tree_report(const CylinderMeasure& mu, const CylinderMeasure& nu) {
  TransportReport r;
  r.value = w1_tree(mu, nu);
  r.dual_value = r.value;
  r.method = TransportMethod::TreeClosedForm;
  r.truncation_error = std::pow(mu.space().gamma(), static_cast<double>(mu.depth()));
  return r;
}

TransportReport w1_lp_oracle(const CylinderMeasure& mu, const CylinderMeasure& nu) {
  require_comparable(mu, nu);
  const std::size_t n = mu.masses().size();
  require(n <= kLpOracleMaxWords, "LP oracle limited to d^n <= 1024 words, got " + std::to_string(n));
  const std::size_t d = mu.space().alphabet();
  const std::size_t depth = mu.depth();
  const double gamma = mu.space().gamma();

  std::vector<double> gamma_pow(depth + 1);
  for (std::size_t i = 0; i <= depth; ++i) gamma_pow[i] = std::pow(gamma, static_cast<double>(i));
  std::vector<double> cost(n * n);
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = 0; v < n; ++v) {
      cost[u * n + v] = u == v ? 0.0 : gamma_pow[first_difference(u, v, depth, d)];
    }
  }

  // Nodes: 0 = super source, 1..n supply words, n+1..2n demand words, 2n+1 = super sink.
  const std::size_t S = 0, T = 2 * n + 1, V = 2 * n + 2;
  const double tiny = 1e-18;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> supply(mu.masses()), demand(nu.masses());
  std::vector<double> flow(n * n, 0.0);
  std::vector<double> price(V, 0.0);
  std::vector<double> dist(V);
  std::vector<std::size_t> parent(V);
  std::vector<char> done(V);

  for (;;) {
    std::fill(dist.begin(), dist.end(), inf);
    std::fill(done.begin(), done.end(), 0);
    dist[S] = 0.0;
    parent[S] = S;
    for (;;) {
      // dense Dijkstra, smallest index wins ties so runs are reproducible
      std::size_t x = V;
      for (std::size_t i = 0; i < V; ++i) {
        if (!done[i] && dist[i] < inf && (x == V || dist[i] < dist[x])) x = i;
      }
      if (x == V) break;
      done[x] = 1;
      const auto relax = [&](std::size_t y, double reduced) {
        const double cand = dist[x] + std::max(0.0, reduced);
        if (cand < dist[y]) {
          dist[y] = cand;
          parent[y] = x;
        }
      };
      if (x == S) {
        for (std::size_t u = 0; u < n; ++u) {
          if (supply[u] > tiny) relax(1 + u, price[S] - price[1 + u]);
        }
      } else if (x <= n) {
        const std::size_t u = x - 1;
        for (std::size_t v = 0; v < n; ++v) relax(n + 1 + v, cost[u * n + v] + price[x] - price[n + 1 + v]);
      } else if (x < T) {
        const std::size_t v = x - n - 1;
        for (std::size_t u = 0; u < n; ++u) {
          if (flow[u * n + v] > tiny) relax(1 + u, -cost[u * n + v] + price[x] - price[1 + u]);
        }
        if (demand[v] > tiny) relax(T, price[x] - price[T]);
      }
    }
    if (dist[T] == inf) break;
    for (std::size_t i = 0; i < V; ++i) price[i] += std::min(dist[i], dist[T]);

    double push = inf;
    for (std::size_t y = T; y != S; y = parent[y]) {
      const std::size_t x = parent[y];
      if (x == S) {
        push = std::min(push, supply[y - 1]);
      } else if (y == T) {
        push = std::min(push, demand[x - n - 1]);
      } else if (x > n) {
        push = std::min(push, flow[(y - 1) * n + (x - n - 1)]);
      }
    }
    for (std::size_t y = T; y != S; y = parent[y]) {
      const std::size_t x = parent[y];
      if (x == S) {
        supply[y - 1] -= push;
      } else if (y == T) {
        demand[x - n - 1] -= push;
      } else if (x <= n) {
        flow[(x - 1) * n + (y - n - 1)] += push;
      } else {
        flow[(y - 1) * n + (x - n - 1)] -= push;
      }
    }
  }

  TransportReport report;
  report.method = TransportMethod::LpOracle;
  report.truncation_error = gamma_pow[depth];
  for (std::size_t i = 0; i < n * n; ++i) report.value += flow[i] * cost[i];

  // c-transform of the demand-side prices is 1-Lipschitz and tight on the plan
  std::vector<double> f(n);
  for (std::size_t w = 0; w < n; ++w) {
    double best = inf;
    for (std::size_t v = 0; v < n; ++v) best = std::min(best, cost[w * n + v] - price[n + 1 + v]);
    f[w] = best;
  }
  const double lo = *std::min_element(f.begin(), f.end());
  for (auto& x : f) x = std::min(1.0, x - lo);
  for (std::size_t w = 0; w < n; ++w) report.dual_value += (mu[w] - nu[w]) * f[w];
  report.potential = DepthKFunction(d, depth, std::move(f));
  return report;
}

ContractionReport contraction_check(const Jacobian& J, const CylinderMeasure& mu, const CylinderMeasure& nu) {
  ContractionReport r;
  r.before = w1_tree(mu, nu);
  require(r.before > 0.0, "contraction ratio undefined for mu = nu");
  r.after = w1_tree(dual_apply(J, mu), dual_apply(J, nu));
  r.ratio = r.after / r.before;
  r.bound = mu.space().contraction_rate();
  return r;
}

BoundReport jacobian_perturbation_check(const Jacobian& J1, const Jacobian& J2, const CylinderMeasure& mu) {
  BoundReport r;
  r.value = w1_tree(dual_apply(J1, mu), dual_apply(J2, mu));
  r.bound = static_cast<double>(mu.space().alphabet()) * sup_distance(J1, J2);
  return r;
}

BoundReport joint_contraction_check(const Jacobian& J1, const Jacobian& J2, const CylinderMeasure& mu1,
                                    const CylinderMeasure& mu2) {
  BoundReport r;
  const double rate = mu1.space().contraction_rate();
  const double jac_dist = static_cast<double>(mu1.space().alphabet()) / rate * sup_distance(J1, J2);
  r.value = w1_tree(dual_apply(J1, mu1), dual_apply(J2, mu2));
  r.bound = rate * (w1_tree(mu1, mu2) + jac_dist);
  return r;
}

ContractionTrials run_contraction_trials(const ShiftSpace& space, std::size_t depth, std::size_t trials,
                                         std::uint64_t seed) {
  ContractionTrials out;
  out.trials = trials;
  out.rate = space.contraction_rate();
  out.worst_perturbation_slack = -std::numeric_limits<double>::infinity();
  out.worst_joint_slack = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, t));
    const std::size_t jdepth = 1 + rng.index(depth + 1);
    const Jacobian J1 = random_jacobian(space, jdepth, rng);
    const Jacobian J2 = random_jacobian(space, jdepth, rng);
    const auto mu = CylinderMeasure::random(space, depth, rng);
    const auto nu = CylinderMeasure::random(space, depth, rng);
    if (!(mu == nu)) {
      const auto c = contraction_check(J1, mu, nu);
      out.max_ratio = std::max(out.max_ratio, c.ratio);
      if (!c.holds()) ++out.contraction_violations;
    }
    const auto p = jacobian_perturbation_check(J1, J2, mu);
    out.worst_perturbation_slack = std::max(out.worst_perturbation_slack, p.value - p.bound);
    if (!p.holds()) ++out.perturbation_violations;
    const auto j = joint_contraction_check(J1, J2, mu, nu);
    out.worst_joint_slack = std::max(out.worst_joint_slack, j.value - j.bound);
    if (!j.holds()) ++out.joint_violations;
  }
  return out;
}

}  // namespace mpt
