#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "mpthermo/shift.hpp"
#include "mpthermo/simplex.hpp"

namespace mpt {

/// Draws independent symbol streams from a stationary Markov (or Bernoulli)
/// measure; orbit i always uses the seed derived from (seed, i).
class OrbitSampler {
 public:
  OrbitSampler(MarkovMeasure measure, std::uint64_t seed);

  const MarkovMeasure& measure() const { return measure_; }
  std::uint64_t seed() const { return seed_; }
  std::vector<int> orbit(std::size_t index, std::size_t length) const;
  /// True when every transition probability is positive.
  bool positive_on_cylinders() const;

 private:
  MarkovMeasure measure_;
  std::uint64_t seed_;
};

/// max of f over the first n shifts of x; x needs n + depth(f) - 1 symbols.
double maxplus_birkhoff(const DepthKFunction& f, std::span<const int> x, std::size_t n);

struct BirkhoffLimitReport {
  std::size_t orbits = 0;
  std::size_t attained = 0;
  double supremum = 0.0;
  /// First step (1-based) at which the running max reached the supremum; 0 if never.
  std::vector<std::size_t> first_hit;
  /// log of the chance that one orbit of this length misses the maximizing
  /// symbols, for depth-1 f under a Bernoulli measure; NaN otherwise.
  double log_miss_probability = 0.0;

  double fraction() const { return orbits ? static_cast<double>(attained) / static_cast<double>(orbits) : 0.0; }
};

BirkhoffLimitReport birkhoff_limit_test(const OrbitSampler& sampler, const DepthKFunction& f, std::size_t orbits,
                                        std::size_t length, double tol = 1e-12);

/// The two-symbol example: symbol 1 carries mass p and f = 0, symbol 0 carries
/// mass 1-p and f = 1. (The usual labels 0/1 of this example map to our 1/0.)
struct BernoulliExample {
  double p;
  MarkovMeasure measure;
  DepthKFunction f;

  static BernoulliExample make(double p);
};

struct PartitionValue {
  double integral = 0.0;
  /// (1/n) log integral, computed in log space.
  double c = 0.0;
};

/// Closed form e^{n s}(1-p^n) + p^n of the example's partition integral at
/// exponent s (s = -t gives the lower tail used by the deviation bound).
PartitionValue partition_function_exact(double p, double s, std::size_t n);

/// Limit of c_n(s) for the example: max(s, log p).
double partition_limit(double p, double s);

/// integral of exp(n s maxsum_n) by summing over every cylinder of length
/// n + depth(f) - 1.
double partition_integral_cylinders(const MarkovMeasure& mu, const DepthKFunction& f, double s, std::size_t n);

/// mu{maxsum_n <= b} by direct cylinder summation.
double maxsum_tail_cylinders(const MarkovMeasure& mu, const DepthKFunction& f, double b, std::size_t n);

struct MonteCarloEstimate {
  double value = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t samples = 0;
};

struct MonteCarloOptions {
  std::size_t samples = 100000;
  std::size_t bootstrap = 200;
  double level = 0.99;
};

/// c_n(s) from sampled orbits with a percentile bootstrap interval.
MonteCarloEstimate partition_function_mc(const OrbitSampler& sampler, const DepthKFunction& f, double s,
                                         std::size_t n, const MonteCarloOptions& options = {});

struct LdpBound {
  double t_star = 0.0;
  double bound = 0.0;
};

/// inf over t >= 0 of t b + c(-t) by golden section on [0, t_max].
LdpBound ldp_upper_bound(const std::function<double(double)>& c_neg, double b, double sup_f, double t_max,
                         double tol = 1e-10);

struct RateEstimate {
  double b = 0.0;
  std::vector<std::size_t> n;
  std::vector<double> rates;
  double limsup = 0.0;
  LdpBound bound;
};

/// Exact rates (1/n) log mu{maxsum_n <= b} for the example.
RateEstimate empirical_rate(double p, double b, const std::vector<std::size_t>& n_list);

struct ConvexityReport {
  /// c(s (+) t) against c(s) (+) c(t).
  double lattice_residual = 0.0;
  /// c((alpha (.) t) (+) (beta (.) s)) - [(alpha (.) c(t)) (+) (beta (.) c(s))]; <= 0 when it holds.
  double convexity_excess = 0.0;
  bool holds(double tol = 1e-12) const { return lattice_residual <= tol && convexity_excess <= tol; }
};

/// Requires f >= 1 (passed as its minimum) and max(alpha, beta) = 0; beta may be -inf.
ConvexityReport c_maxplus_convexity_check(const std::function<double(double)>& c, double f_min, double s,
                                          double t, double alpha, double beta);

}  // namespace mpt
