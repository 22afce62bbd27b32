#include "mpthermo/ifs.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mpthermo/transport.hpp"

namespace mpt {

WeightedJacobianFamily::WeightedJacobianFamily(ShiftSpace space, std::vector<Jacobian> jacobians,
                                               std::vector<double> weights)
    : space_(space), jacobians_(std::move(jacobians)), weights_(std::move(weights)) {
  require(!jacobians_.empty(), "Jacobian family must be nonempty");
  require(jacobians_.size() == weights_.size(), "one weight per Jacobian required");
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    require(std::isfinite(weights_[i]) && weights_[i] <= 0.0, "family weights must be finite and <= 0");
    require(jacobians_[i].alphabet() == space_.alphabet(), "Jacobian alphabet differs from the family space");
    top = std::max(top, weights_[i]);
  }
  require(top == 0.0, "family weights must attain max q = 0");
}

std::size_t WeightedJacobianFamily::max_jacobian_depth() const {
  std::size_t k = 0;
  for (const auto& J : jacobians_) k = std::max(k, J.depth());
  return k;
}

namespace {

std::size_t ipow(std::size_t base, std::size_t exp, std::size_t cap) {
  std::size_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (out > cap / base) return cap + 1;
    out *= base;
  }
  return out;
}

struct Layout {
  CylinderMeasure start;
  std::size_t depth;
};

// Refines nu0 far enough for every Jacobian and picks the leaf table depth.
// Coarsening commutes with the dual operators as long as depth >= k_max - 1.
Layout prepare(const WeightedJacobianFamily& fam, std::size_t N, const CylinderMeasure& nu0,
               const AttractorOptions& options) {
  require(nu0.space() == fam.space(), "initial measure lives on a different space");
  const std::size_t kmax = fam.max_jacobian_depth();
  const std::size_t d = fam.space().alphabet();
  CylinderMeasure start = nu0.at_depth(std::max(nu0.depth(), kmax - 1));
  std::size_t depth = 0;
  if (options.measure_depth) {
    depth = *options.measure_depth;
    require(depth + 1 >= kmax, "measure depth must be at least the Jacobian depth - 1");
  } else {
    depth = std::max(kmax - 1, std::size_t{0});
    while (depth < start.depth() + N && ipow(d, depth + 1, kAttractorTableCap) <= kAttractorTableCap) ++depth;
  }
  if (start.depth() > depth) start = start.coarsen(depth);
  return {std::move(start), depth};
}

CylinderMeasure step(const Jacobian& J, const CylinderMeasure& mu, std::size_t depth) {
  CylinderMeasure out = dual_apply(J, mu);
  return out.depth() > depth ? out.coarsen(depth) : out;
}

std::size_t suggest_N(std::size_t m, std::size_t table, const AttractorOptions& options) {
  std::size_t n = 0;
  while (ipow(m, n + 1, options.leaf_budget) <= options.leaf_budget &&
         ipow(m, n + 1, options.entry_budget) <= options.entry_budget / table) {
    ++n;
    if (m == 1) break;
  }
  return n;
}

}  // namespace

AttractorSample attractor_build(const WeightedJacobianFamily& fam, std::size_t N, const CylinderMeasure& nu0,
                                const AttractorOptions& options) {
  require(N >= 1, "attractor depth N must be >= 1");
  const std::size_t m = fam.size();
  Layout layout = prepare(fam, N, nu0, options);
  const std::size_t table = ipow(fam.space().alphabet(), layout.depth, kMaxTableSize);
  const std::size_t leaves = ipow(m, N, options.leaf_budget);
  if (leaves > options.leaf_budget || leaves > options.entry_budget / table) {
    throw PreconditionError("attractor enumeration of " + std::to_string(m) + "^" + std::to_string(N) +
                            " words exceeds the budget; try N <= " +
                            std::to_string(suggest_N(m, table, options)));
  }

  AttractorSample sample;
  sample.N = N;
  sample.rate = fam.space().contraction_rate();
  sample.measure_depth = std::min(layout.depth, layout.start.depth() + N);
  sample.weight_floor = options.weight_floor;
  sample.epsilon = options.epsilon.value_or(
      std::max(std::pow(sample.rate, static_cast<double>(N)),
               std::pow(fam.space().gamma(), static_cast<double>(sample.measure_depth))));

  // Words are built from the innermost letter outward so suffixes share work.
  std::vector<int> letters(N);
  std::vector<std::pair<std::size_t, AttractorLeaf>> found;
  const auto expand = [&](auto&& self, std::size_t pos, const CylinderMeasure& mu, double weight) -> void {
    for (std::size_t i = 0; i < m; ++i) {
      const double w = weight + fam.weight(i);
      if (w < options.weight_floor) {
        ++sample.pruned;
        continue;
      }
      letters[pos] = static_cast<int>(i);
      CylinderMeasure next = step(fam.jacobian(i), mu, layout.depth);
      if (pos == 0) {
        Word word(letters, m);
        const std::size_t key = word.encode();
        found.emplace_back(key, AttractorLeaf{std::move(word), std::move(next), w});
      } else {
        self(self, pos - 1, next, w);
      }
    }
  };
  expand(expand, N - 1, layout.start, 0.0);
  std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  sample.leaves.reserve(found.size());
  for (auto& entry : found) sample.leaves.push_back(std::move(entry.second));

  if (options.merge) {
    for (std::size_t i = 0; i < sample.leaves.size(); ++i) {
      const auto& leaf = sample.leaves[i];
      bool placed = false;
      for (auto& c : sample.clusters) {
        const double dist = w1_tree(sample.leaves[c.representative].measure, leaf.measure);
        if (dist <= sample.epsilon) {
          c.members.push_back(i);
          c.weight = std::max(c.weight, leaf.weight);
          c.diameter = std::max(c.diameter, dist);
          placed = true;
          break;
        }
      }
      if (!placed) sample.clusters.push_back({i, {i}, leaf.weight, 0.0});
    }
  }
  return sample;
}

DensityEstimate density_entropy_estimate(const AttractorSample& sample, const CylinderMeasure& mu) {
  DensityEstimate out;
  out.drift = std::pow(sample.rate, static_cast<double>(sample.N)) / (1.0 - sample.rate);
  if (sample.leaves.empty()) return out;
  const CylinderMeasure target = mu.at_depth(sample.measure_depth);
  for (const auto& leaf : sample.leaves) {
    const double dist = w1_tree(leaf.measure, target);
    if (dist <= sample.epsilon) {
      out.value = oplus(out.value, MaxPlusValue(leaf.weight));
      ++out.matches;
    }
    if (dist <= sample.epsilon + out.drift) out.upper = oplus(out.upper, MaxPlusValue(leaf.weight));
  }
  return out;
}

InvariantPressure invariant_pressure_solve(const WeightedJacobianFamily& fam, const MeasureObservable& g,
                                           double g_lipschitz, std::size_t N, const CylinderMeasure& nu0,
                                           const AttractorOptions& options) {
  require(g_lipschitz >= 0.0, "observable Lipschitz constant must be >= 0");
  AttractorOptions opts = options;
  opts.merge = false;
  const AttractorSample sample = attractor_build(fam, N, nu0, opts);
  require(!sample.leaves.empty(), "every branch was pruned");
  InvariantPressure out;
  out.value = -std::numeric_limits<double>::infinity();
  for (const auto& leaf : sample.leaves) {
    const double v = leaf.weight + g(leaf.measure);
    if (v > out.value) {
      out.value = v;
      out.argmax = leaf.word;
    }
  }
  const double r = sample.rate;
  out.error_bound = g_lipschitz * std::pow(r, static_cast<double>(N)) / (1.0 - r);

  double next = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < fam.size(); ++i) {
    for (const auto& leaf : sample.leaves) {
      const CylinderMeasure image = step(fam.jacobian(i), leaf.measure, sample.measure_depth);
      next = std::max(next, fam.weight(i) + leaf.weight + g(image));
    }
  }
  out.fixed_point_residual = std::abs(next - out.value);
  return out;
}

BruteForceComparison compare_with_brute_force(const WeightedJacobianFamily& fam, std::size_t N,
                                              const CylinderMeasure& nu0, const AttractorSample& sample) {
  AttractorOptions opts;
  opts.measure_depth = sample.measure_depth;
  const Layout layout = prepare(fam, N, nu0, opts);
  BruteForceComparison out;
  out.leaves = sample.leaves.size();
  for (const auto& leaf : sample.leaves) {
    std::vector<Jacobian> js;
    double weight = 0.0;
    for (std::size_t i = N; i-- > 0;) weight += fam.weight(static_cast<std::size_t>(leaf.word[i]));
    for (std::size_t i = 0; i < N; ++i) js.push_back(fam.jacobian(static_cast<std::size_t>(leaf.word[i])));
    const CylinderMeasure direct = compose_duals(js, layout.start).measure.at_depth(sample.measure_depth);
    for (std::size_t w = 0; w < direct.masses().size(); ++w) {
      const double diff = std::abs(direct[w] - leaf.measure[w]);
      out.max_mass_difference = std::max(out.max_mass_difference, diff);
      if (direct[w] != leaf.measure[w]) out.bitwise_equal = false;
    }
    out.max_weight_difference = std::max(out.max_weight_difference, std::abs(weight - leaf.weight));
    if (weight != leaf.weight) out.bitwise_equal = false;
  }
  return out;
}

ProbVector pushforward(const ProbVector& p, const std::vector<std::size_t>& T) {
  require(T.size() == p.size(), "map on the alphabet must have one image per symbol");
  std::vector<double> out(p.size(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    require(T[i] < p.size(), "map image out of range");
    out[T[i]] += p[i];
  }
  return ProbVector(std::move(out));
}

PushforwardInvarianceReport pushforward_invariance_check(const DensitySample<ProbVector>& h,
                                                         const std::vector<std::size_t>& T,
                                                         const std::vector<std::vector<double>>& observables,
                                                         double tol) {
  require(h.has_support(), "density has empty support");
  const auto& pts = h.points();
  const std::size_t n = pts.size();
  std::vector<std::size_t> image(n);
  for (std::size_t i = 0; i < n; ++i) {
    const ProbVector q = pushforward(pts[i], T);
    std::size_t found = n;
    for (std::size_t j = 0; j < n && found == n; ++j) {
      if (linf_distance(q, pts[j]) <= 1e-12) found = j;
    }
    require(found < n, "grid is not closed under the pushforward");
    image[i] = found;
  }

  PushforwardInvarianceReport report;
  std::vector<MaxPlusValue> pushed(n);
  for (std::size_t i = 0; i < n; ++i) pushed[image[i]] = oplus(pushed[image[i]], h.values()[i]);
  for (std::size_t i = 0; i < n; ++i) {
    report.density_residual = std::max(report.density_residual, residual(pushed[i], h.values()[i]));
  }

  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& v : h.values()) {
    if (v.is_finite()) {
      lo = std::min(lo, v.value());
      hi = std::max(hi, v.value());
    }
  }
  const double K = 2.0 * (hi - lo) + 10.0;
  std::vector<std::vector<double>> family = observables;
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> peak(n, -K);
    peak[j] = 0.0;
    family.push_back(std::move(peak));
  }
  for (std::size_t f = 0; f < family.size(); ++f) {
    require(family[f].size() == n, "observable tables must cover the grid");
    MaxPlusValue plain, composed;
    for (std::size_t i = 0; i < n; ++i) {
      plain = oplus(plain, odot(h.values()[i], MaxPlusValue(family[f][i])));
      composed = oplus(composed, odot(h.values()[i], MaxPlusValue(family[f][image[i]])));
    }
    const double res = residual(plain, composed);
    report.observable_residual = std::max(report.observable_residual, res);
    if (res > tol && !report.witness) report.witness = f;
  }
  report.invariant = report.density_residual <= tol && report.observable_residual <= tol;
  return report;
}

}  // namespace mpt
