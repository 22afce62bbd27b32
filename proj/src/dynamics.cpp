#include "mpthermo/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mpthermo/rng.hpp"

namespace mpt {

namespace {

int draw(const ProbVector& p, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  int last = 0;
  for (std::size_t a = 0; a < p.size(); ++a) {
    if (p[a] <= 0.0) continue;
    acc += p[a];
    last = static_cast<int>(a);
    if (u < acc) return last;
  }
  return last;
}

bool is_bernoulli(const MarkovMeasure& mu) {
  for (const auto& row : mu.rows) {
    if (!(row == mu.rows.front())) return false;
  }
  return true;
}

// Enumerates every word of the given length with its Markov mass and the
// running max of f over the windows completed so far.
template <typename Visit>
void for_each_cylinder(const MarkovMeasure& mu, const DepthKFunction& f, std::size_t n, Visit&& visit) {
  const std::size_t k = std::max<std::size_t>(f.depth(), 1);
  const std::size_t length = n + k - 1;
  const std::size_t d = mu.alphabet();
  require(f.alphabet() == d, "function and measure alphabets differ");
  require(length <= 40 && std::pow(static_cast<double>(d), static_cast<double>(length)) <= 1 << 26,
          "direct cylinder summation limited to 2^26 words");
  std::vector<int> x(length);
  const auto rec = [&](auto&& self, std::size_t pos, double mass, double runmax) -> void {
    if (pos == length) {
      visit(mass, runmax);
      return;
    }
    for (std::size_t a = 0; a < d; ++a) {
      const double m = pos == 0 ? mu.stationary[a] : mass * mu.rows[static_cast<std::size_t>(x[pos - 1])][a];
      if (m == 0.0) continue;
      x[pos] = static_cast<int>(a);
      double r = runmax;
      if (pos + 1 >= k) {
        const std::size_t i = pos + 1 - k;
        r = std::max(r, f.at(std::span<const int>(x).subspan(i, k)));
      }
      self(self, pos + 1, m, r);
    }
  };
  rec(rec, 0, 1.0, -std::numeric_limits<double>::infinity());
}

}  // namespace

OrbitSampler::OrbitSampler(MarkovMeasure measure, std::uint64_t seed) : measure_(std::move(measure)), seed_(seed) {
  require(measure_.alphabet() >= 1 && measure_.stationary.size() == measure_.alphabet(),
          "orbit sampler needs a stationary vector matching the transition rows");
}

std::vector<int> OrbitSampler::orbit(std::size_t index, std::size_t length) const {
  Rng rng(derive_seed(seed_, index));
  std::vector<int> x(length);
  for (std::size_t i = 0; i < length; ++i) {
    x[i] = draw(i == 0 ? measure_.stationary : measure_.rows[static_cast<std::size_t>(x[i - 1])], rng);
  }
  return x;
}

bool OrbitSampler::positive_on_cylinders() const {
  for (const auto& row : measure_.rows) {
    for (double v : row.masses()) {
      if (v <= 0.0) return false;
    }
  }
  return true;
}

double maxplus_birkhoff(const DepthKFunction& f, std::span<const int> x, std::size_t n) {
  require(n >= 1, "Birkhoff max needs n >= 1");
  const std::size_t k = f.depth();
  require(x.size() + 1 >= n + std::max<std::size_t>(k, 1),
          "word of length " + std::to_string(x.size()) + " too short for " + std::to_string(n) + " shifts");
  double out = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) out = std::max(out, f.at(x.subspan(i)));
  return out;
}

BirkhoffLimitReport birkhoff_limit_test(const OrbitSampler& sampler, const DepthKFunction& f, std::size_t orbits,
                                        std::size_t length, double tol) {
  require(sampler.positive_on_cylinders(), "sampler measure must be positive on every cylinder");
  require(length >= 1, "orbit length must be >= 1");
  BirkhoffLimitReport report;
  report.orbits = orbits;
  report.supremum = f.sup();
  const std::size_t k = std::max<std::size_t>(f.depth(), 1);
  for (std::size_t o = 0; o < orbits; ++o) {
    const auto x = sampler.orbit(o, length + k - 1);
    std::size_t hit = 0;
    for (std::size_t i = 0; i < length && hit == 0; ++i) {
      if (f.at(std::span<const int>(x).subspan(i)) >= report.supremum - tol) hit = i + 1;
    }
    report.first_hit.push_back(hit);
    if (hit) ++report.attained;
  }
  report.log_miss_probability = std::numeric_limits<double>::quiet_NaN();
  if (f.depth() <= 1 && is_bernoulli(sampler.measure())) {
    double hit_mass = 0.0;
    for (std::size_t a = 0; a < f.alphabet(); ++a) {
      if (f.depth() == 0 || f[a] >= report.supremum - tol) hit_mass += sampler.measure().rows.front()[a];
    }
    report.log_miss_probability = static_cast<double>(length) * std::log1p(-std::min(hit_mass, 1.0));
  }
  return report;
}

BernoulliExample BernoulliExample::make(double p) {
  require(p > 0.0 && p < 1.0, "example requires 0 < p < 1, got " + std::to_string(p));
  return {p, MarkovMeasure::bernoulli(ProbVector({1.0 - p, p})), DepthKFunction(2, 1, {1.0, 0.0})};
}

PartitionValue partition_function_exact(double p, double s, std::size_t n) {
  require(p > 0.0 && p < 1.0, "example requires 0 < p < 1, got " + std::to_string(p));
  require(n >= 1, "n must be >= 1");
  const double nn = static_cast<double>(n);
  const double log_pn = nn * std::log(p);
  const double terms[2] = {nn * s + std::log1p(-std::exp(log_pn)), log_pn};
  PartitionValue out;
  const double lse = log_sum_exp(terms);
  out.integral = std::exp(nn * s) * (1.0 - std::pow(p, nn)) + std::pow(p, nn);
  out.c = lse / nn;
  return out;
}

double partition_limit(double p, double s) { return std::max(s, std::log(p)); }

double partition_integral_cylinders(const MarkovMeasure& mu, const DepthKFunction& f, double s, std::size_t n) {
  const double scale = static_cast<double>(n) * s;
  double total = 0.0;
  for_each_cylinder(mu, f, n, [&](double mass, double m) { total += mass * std::exp(scale * m); });
  return total;
}

double maxsum_tail_cylinders(const MarkovMeasure& mu, const DepthKFunction& f, double b, std::size_t n) {
  double total = 0.0;
  for_each_cylinder(mu, f, n, [&](double mass, double m) {
    if (m <= b) total += mass;
  });
  return total;
}

MonteCarloEstimate partition_function_mc(const OrbitSampler& sampler, const DepthKFunction& f, double s,
                                         std::size_t n, const MonteCarloOptions& options) {
  require(options.samples >= 2, "Monte Carlo needs at least two samples");
  require(options.level > 0.0 && options.level < 1.0, "confidence level must lie in (0,1)");
  const std::size_t k = std::max<std::size_t>(f.depth(), 1);
  const double nn = static_cast<double>(n);
  std::vector<double> x(options.samples);
  for (std::size_t i = 0; i < options.samples; ++i) {
    x[i] = nn * s * maxplus_birkhoff(f, sampler.orbit(i, n + k - 1), n);
  }
  const double log_count = std::log(static_cast<double>(options.samples));
  MonteCarloEstimate out;
  out.samples = options.samples;
  out.value = (log_sum_exp(x) - log_count) / nn;

  std::vector<double> reps(options.bootstrap);
  std::vector<double> resample(options.samples);
  for (std::size_t b = 0; b < options.bootstrap; ++b) {
    Rng rng(derive_seed(sampler.seed() ^ 0x9e3779b97f4a7c15ULL, b));
    for (auto& v : resample) v = x[rng.index(x.size())];
    reps[b] = (log_sum_exp(resample) - log_count) / nn;
  }
  std::sort(reps.begin(), reps.end());
  if (reps.empty()) {
    out.ci_low = out.ci_high = out.value;
  } else {
    const double tail = (1.0 - options.level) / 2.0;
    const auto at = [&](double q) {
      const auto i = static_cast<std::size_t>(std::floor(q * static_cast<double>(reps.size() - 1)));
      return reps[std::min(i, reps.size() - 1)];
    };
    out.ci_low = at(tail);
    out.ci_high = reps[std::min(reps.size() - 1, static_cast<std::size_t>(std::ceil(
                                                         (1.0 - tail) * static_cast<double>(reps.size() - 1))))];
  }
  return out;
}

LdpBound ldp_upper_bound(const std::function<double(double)>& c_neg, double b, double sup_f, double t_max,
                         double tol) {
  require(b < sup_f, "deviation threshold b must lie below sup f");
  require(t_max > 0.0 && std::isfinite(t_max), "search bracket must be positive and finite");
  const auto objective = [&](double t) { return t * b + c_neg(t); };
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0, hi = t_max;
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  double f1 = objective(x1), f2 = objective(x2);
  while (hi - lo > tol) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = objective(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = objective(x2);
    }
  }
  LdpBound out{(lo + hi) / 2.0, 0.0};
  out.bound = objective(out.t_star);
  for (double edge : {0.0, t_max}) {
    const double v = objective(edge);
    if (v < out.bound) out = {edge, v};
  }
  return out;
}

RateEstimate empirical_rate(double p, double b, const std::vector<std::size_t>& n_list) {
  require(p > 0.0 && p < 1.0, "example requires 0 < p < 1, got " + std::to_string(p));
  require(!n_list.empty(), "need at least one n");
  RateEstimate out;
  out.b = b;
  const double log_p = std::log(p);
  for (std::size_t n : n_list) {
    require(n >= 1, "n must be >= 1");
    // the max-sum is 0 or 1: below 1 only on the all-zero-f cylinder of mass p^n
    double rate = 0.0;
    if (b < 0.0) {
      rate = -std::numeric_limits<double>::infinity();
    } else if (b < 1.0) {
      rate = static_cast<double>(n) * log_p / static_cast<double>(n);
    }
    out.n.push_back(n);
    out.rates.push_back(rate);
  }
  out.limsup = out.rates.back();
  if (b < 1.0) {
    const double t_max = 10.0 * std::abs(std::log(std::min(p, 1.0 - p)));
    out.bound = ldp_upper_bound([&](double t) { return partition_limit(p, -t); }, b, 1.0, t_max);
  } else {
    out.bound = {0.0, 0.0};
  }
  return out;
}

ConvexityReport c_maxplus_convexity_check(const std::function<double(double)>& c, double f_min, double s,
                                          double t, double alpha, double beta) {
  require(f_min >= 1.0, "max-plus convexity of c needs f >= 1");
  require(std::max(alpha, beta) == 0.0, "weights must satisfy max(alpha, beta) = 0");
  ConvexityReport out;
  out.lattice_residual = std::abs(c(std::max(s, t)) - std::max(c(s), c(t)));
  const double ninf = -std::numeric_limits<double>::infinity();
  const double at = alpha + t;
  const double bs = beta == ninf ? ninf : beta + s;
  const double lhs = c(std::max(at, bs));
  const double rhs = std::max(alpha + c(t), beta == ninf ? ninf : beta + c(s));
  out.convexity_excess = lhs - rhs;
  return out;
}

}  // namespace mpt
