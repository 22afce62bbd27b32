#include "mpthermo/shift.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

#include "mpthermo/rng.hpp"
#include "mpthermo/transport.hpp"

namespace mpt {

namespace {

std::size_t checked_pow(std::size_t base, std::size_t exp) {
  std::size_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    require(out <= kMaxTableSize / base, "table of " + std::to_string(base) + "^" + std::to_string(exp) +
                                             " words exceeds the dense table cap");
    out *= base;
  }
  return out;
}

}  // namespace

ShiftSpace::ShiftSpace(std::size_t alphabet, double gamma) : alphabet_(alphabet), gamma_(gamma) {
  require(alphabet_ >= 2, "shift alphabet must have d >= 2 symbols");
  require(gamma_ > 0.0 && gamma_ < 1.0 / static_cast<double>(alphabet_ + 1),
          "metric parameter gamma must satisfy 0 < gamma < 1/(d+1), got " + std::to_string(gamma_));
}

std::size_t ShiftSpace::words(std::size_t length) const { return checked_pow(alphabet_, length); }

Word::Word(std::vector<int> symbols, std::size_t alphabet) : symbols_(std::move(symbols)), alphabet_(alphabet) {
  require(alphabet_ >= 1, "word alphabet must be nonempty");
  for (int s : symbols_) {
    require(s >= 0 && static_cast<std::size_t>(s) < alphabet_, "word symbol out of range: " + std::to_string(s));
  }
}

Word Word::decode(std::size_t index, std::size_t length, std::size_t alphabet) {
  std::vector<int> s(length);
  for (std::size_t i = length; i-- > 0;) {
    s[i] = static_cast<int>(index % alphabet);
    index /= alphabet;
  }
  return Word(std::move(s), alphabet);
}

std::size_t Word::encode() const {
  std::size_t out = 0;
  for (int s : symbols_) out = out * alphabet_ + static_cast<std::size_t>(s);
  return out;
}

std::size_t first_difference(std::size_t u, std::size_t v, std::size_t length, std::size_t alphabet) {
  if (u == v) return length;
  // strip common suffix digits until the remaining prefixes agree
  std::size_t agree_from = length;
  std::size_t pos = length;
  while (pos > 0) {
    --pos;
    if (u % alphabet != v % alphabet) agree_from = pos;
    u /= alphabet;
    v /= alphabet;
  }
  return agree_from;
}

double word_metric(const Word& u, const Word& v, const ShiftSpace& space) {
  require(u.length() == v.length(), "word_metric: words of different lengths");
  for (std::size_t i = 0; i < u.length(); ++i) {
    if (u[i] != v[i]) return std::pow(space.gamma(), static_cast<double>(i));
  }
  return 0.0;
}

DepthKFunction::DepthKFunction(std::size_t alphabet, std::size_t depth, std::vector<double> values)
    : alphabet_(alphabet), depth_(depth), values_(std::move(values)) {
  require(alphabet_ >= 1, "function alphabet must be nonempty");
  require(values_.size() == checked_pow(alphabet_, depth_), "function table has the wrong size for its depth");
  for (double v : values_) require(std::isfinite(v), "function values must be finite");
}

DepthKFunction DepthKFunction::constant(std::size_t alphabet, double c) {
  return DepthKFunction(alphabet, 0, {c});
}

double DepthKFunction::at(std::span<const int> word) const {
  require(word.size() >= depth_, "word shorter than the function depth");
  std::size_t idx = 0;
  for (std::size_t i = 0; i < depth_; ++i) idx = idx * alphabet_ + static_cast<std::size_t>(word[i]);
  return values_[idx];
}

double DepthKFunction::at_encoded(std::size_t word, std::size_t length) const {
  require(length >= depth_, "word shorter than the function depth");
  std::size_t drop = 1;
  for (std::size_t i = depth_; i < length; ++i) drop *= alphabet_;
  return values_[word / drop];
}

double DepthKFunction::sup() const { return *std::max_element(values_.begin(), values_.end()); }
double DepthKFunction::inf() const { return *std::min_element(values_.begin(), values_.end()); }
double DepthKFunction::sup_norm() const { return std::max(std::abs(sup()), std::abs(inf())); }

double lipschitz_constant(const DepthKFunction& f, const ShiftSpace& space) {
  const std::size_t d = f.alphabet();
  require(d == space.alphabet(), "function and space alphabets differ");
  if (f.depth() == 0) return 0.0;
  // Subtree extremes level by level. Pairs first differing at index L live in
  // different child subtrees of one node at level L and sit at distance gamma^L.
  std::vector<double> hi = f.values();
  std::vector<double> lo = f.values();
  double lip = 0.0;
  for (std::size_t level = f.depth(); level-- > 0;) {
    const std::size_t nodes = hi.size() / d;
    std::vector<double> node_hi(nodes), node_lo(nodes);
    const double scale = std::pow(space.gamma(), static_cast<double>(level));
    for (std::size_t n = 0; n < nodes; ++n) {
      double best_hi = -std::numeric_limits<double>::infinity();
      double best_lo = std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = 0; b < d; ++b) {
          if (a == b) continue;
          lip = std::max(lip, (hi[n * d + a] - lo[n * d + b]) / scale);
        }
        best_hi = std::max(best_hi, hi[n * d + a]);
        best_lo = std::min(best_lo, lo[n * d + a]);
      }
      node_hi[n] = best_hi;
      node_lo[n] = best_lo;
    }
    hi.swap(node_hi);
    lo.swap(node_lo);
  }
  return lip;
}

Jacobian::Jacobian(DepthKFunction values, const ShiftSpace& space) : values_(std::move(values)), lipschitz_(0.0) {
  require(values_.alphabet() == space.alphabet(), "Jacobian alphabet differs from the space");
  require(values_.depth() >= 1, "Jacobian must depend on at least the first symbol");
  const std::size_t d = values_.alphabet();
  for (double v : values_.values()) require(v >= 0.0 && v <= 1.0, "Jacobian values must lie in [0,1]");
  // J(a w) for fixed tail w are spaced by d^(k-1) in the table
  const std::size_t tails = values_.values().size() / d;
  for (std::size_t w = 0; w < tails; ++w) {
    double s = 0.0;
    for (std::size_t a = 0; a < d; ++a) s += values_[a * tails + w];
    require(std::abs(s - 1.0) <= 1e-12, "Jacobian not normalized: sum over first symbol is " + std::to_string(s));
  }
  lipschitz_ = lipschitz_constant(values_, space);
  require(lipschitz_ <= 1.0 + 1e-9, "Jacobian Lipschitz constant " + std::to_string(lipschitz_) + " exceeds 1");
}

Jacobian make_bernoulli_jacobian(double p, const ShiftSpace& space) {
  require(space.alphabet() == 2, "J_p is defined on the two-letter shift");
  require(p >= 0.0 && p <= 1.0, "J_p requires p in [0,1], got " + std::to_string(p));
  const double probs[2] = {p, 1.0 - p};
  return make_product_jacobian(probs, space);
}

Jacobian make_product_jacobian(std::span<const double> probs, const ShiftSpace& space) {
  require(probs.size() == space.alphabet(), "one weight per symbol required");
  return Jacobian(DepthKFunction(space.alphabet(), 1, std::vector<double>(probs.begin(), probs.end())), space);
}

Jacobian random_jacobian(const ShiftSpace& space, std::size_t depth, Rng& rng) {
  require(depth >= 1, "Jacobian depth must be >= 1");
  const std::size_t d = space.alphabet();
  const std::size_t size = space.words(depth);
  const std::size_t tails = size / d;
  const std::vector<double> base = rng.simplex_point(d);
  std::vector<double> raw(size);
  for (std::size_t w = 0; w < tails; ++w) {
    const auto row = rng.simplex_point(d);
    for (std::size_t a = 0; a < d; ++a) raw[a * tails + w] = row[a];
  }
  // Blend toward the tail-independent row: only pairs sharing the first
  // symbol are scaled, so the blended Lipschitz constant is lambda * L_raw
  // within a fixed first symbol.
  double lip_within = 0.0;
  const double g = space.gamma();
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t u = 0; u < tails; ++u) {
      for (std::size_t v = u + 1; v < tails; ++v) {
        const std::size_t i = 1 + first_difference(u, v, depth - 1, d);
        lip_within = std::max(lip_within, std::abs(raw[a * tails + u] - raw[a * tails + v]) /
                                              std::pow(g, static_cast<double>(i)));
      }
    }
  }
  const double lambda = lip_within > 0.0 ? std::min(1.0, rng.uniform(0.2, 0.999) / lip_within) : 1.0;
  std::vector<double> values(size);
  for (std::size_t w = 0; w < tails; ++w) {
    double s = 0.0;
    for (std::size_t a = 0; a < d; ++a) {
      values[a * tails + w] = base[a] + lambda * (raw[a * tails + w] - base[a]);
      s += values[a * tails + w];
    }
    for (std::size_t a = 0; a < d; ++a) values[a * tails + w] /= s;
  }
  return Jacobian(DepthKFunction(d, depth, std::move(values)), space);
}

double sup_distance(const Jacobian& a, const Jacobian& b) {
  require(a.depth() == b.depth() && a.alphabet() == b.alphabet(), "Jacobians of different shapes");
  double out = 0.0;
  for (std::size_t i = 0; i < a.function().values().size(); ++i) out = std::max(out, std::abs(a[i] - b[i]));
  return out;
}

CylinderMeasure::CylinderMeasure(ShiftSpace space, std::size_t depth, std::vector<double> masses)
    : space_(space), depth_(depth), masses_(std::move(masses)) {
  require(masses_.size() == space_.words(depth_), "measure table has the wrong size for its depth");
  double total = 0.0;
  for (double m : masses_) {
    require(std::isfinite(m) && m >= 0.0, "cylinder masses must be nonnegative");
    total += m;
  }
  require(std::abs(total - 1.0) <= 1e-12, "cylinder masses sum to " + std::to_string(total));
}

CylinderMeasure CylinderMeasure::trivial(const ShiftSpace& space) { return CylinderMeasure(space, 0, {1.0}); }

CylinderMeasure CylinderMeasure::uniform(const ShiftSpace& space, std::size_t depth) {
  const std::size_t n = space.words(depth);
  return CylinderMeasure(space, depth, std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

CylinderMeasure CylinderMeasure::point_mass(const ShiftSpace& space, const Word& word) {
  require(word.alphabet() == space.alphabet(), "word alphabet differs from the space");
  std::vector<double> m(space.words(word.length()), 0.0);
  m[word.encode()] = 1.0;
  return CylinderMeasure(space, word.length(), std::move(m));
}

CylinderMeasure CylinderMeasure::product(const ShiftSpace& space, const std::vector<std::vector<double>>& rows) {
  const std::size_t d = space.alphabet();
  std::vector<double> m{1.0};
  for (const auto& row : rows) {
    require(row.size() == d, "product row has the wrong number of symbols");
    std::vector<double> next(m.size() * d);
    for (std::size_t w = 0; w < m.size(); ++w) {
      for (std::size_t a = 0; a < d; ++a) next[w * d + a] = m[w] * row[a];
    }
    m.swap(next);
  }
  return CylinderMeasure(space, rows.size(), std::move(m));
}

CylinderMeasure CylinderMeasure::random(const ShiftSpace& space, std::size_t depth, Rng& rng) {
  std::vector<double> m = rng.simplex_point(space.words(depth));
  // occasionally sparsify so tests see zero-mass cylinders
  if (m.size() > 1 && rng.uniform() < 0.25) {
    for (auto& x : m) {
      if (rng.uniform() < 0.5) x = 0.0;
    }
    double total = std::accumulate(m.begin(), m.end(), 0.0);
    if (total <= 0.0) {
      m.assign(m.size(), 0.0);
      m[rng.index(m.size())] = 1.0;
    } else {
      for (auto& x : m) x /= total;
    }
  }
  double total = std::accumulate(m.begin(), m.end(), 0.0);
  for (auto& x : m) x /= total;
  return CylinderMeasure(space, depth, std::move(m));
}

double CylinderMeasure::cylinder(const Word& prefix) const {
  require(prefix.length() <= depth_, "prefix longer than the measure depth");
  return coarsen(prefix.length())[prefix.encode()];
}

CylinderMeasure CylinderMeasure::refine() const {
  const std::size_t d = space_.alphabet();
  std::vector<double> m(masses_.size() * d);
  const double share = 1.0 / static_cast<double>(d);
  for (std::size_t w = 0; w < masses_.size(); ++w) {
    for (std::size_t a = 0; a < d; ++a) m[w * d + a] = masses_[w] * share;
  }
  return CylinderMeasure(space_, depth_ + 1, std::move(m));
}

CylinderMeasure CylinderMeasure::coarsen(std::size_t depth) const {
  require(depth <= depth_, "cannot coarsen to a larger depth");
  if (depth == depth_) return *this;
  const std::size_t n = space_.words(depth);
  const std::size_t block = masses_.size() / n;
  std::vector<double> m(n, 0.0);
  for (std::size_t w = 0; w < masses_.size(); ++w) m[w / block] += masses_[w];
  return CylinderMeasure(space_, depth, std::move(m));
}

CylinderMeasure CylinderMeasure::at_depth(std::size_t depth) const {
  if (depth <= depth_) return coarsen(depth);
  CylinderMeasure out = *this;
  while (out.depth() < depth) out = out.refine();
  return out;
}

double CylinderMeasure::integrate(const DepthKFunction& f) const {
  require(f.alphabet() == space_.alphabet(), "function and measure alphabets differ");
  require(f.depth() <= depth_, "function deeper than the measure");
  double s = 0.0;
  for (std::size_t w = 0; w < masses_.size(); ++w) {
    if (masses_[w] != 0.0) s += masses_[w] * f.at_encoded(w, depth_);
  }
  return s;
}

DepthKFunction transfer_apply(const Jacobian& J, const DepthKFunction& f) {
  require(J.alphabet() == f.alphabet(), "Jacobian and function alphabets differ");
  const std::size_t d = f.alphabet();
  const std::size_t k = std::max(J.depth(), f.depth());
  std::size_t tails = 1;
  for (std::size_t i = 1; i < k; ++i) tails *= d;
  std::vector<double> out(tails, 0.0);
  for (std::size_t x = 0; x < tails; ++x) {
    double s = 0.0;
    for (std::size_t a = 0; a < d; ++a) {
      const std::size_t ax = a * tails + x;
      s += J.function().at_encoded(ax, k) * f.at_encoded(ax, k);
    }
    out[x] = s;
  }
  return DepthKFunction(d, k - 1, std::move(out));
}

CylinderMeasure dual_apply(const Jacobian& J, const CylinderMeasure& mu) {
  require(J.alphabet() == mu.space().alphabet(), "Jacobian and measure alphabets differ");
  require(J.depth() <= mu.depth() + 1,
          "dual_apply: Jacobian depth " + std::to_string(J.depth()) + " exceeds measure depth + 1 (" +
              std::to_string(mu.depth() + 1) + "); refine the measure first");
  const std::size_t d = mu.space().alphabet();
  const std::size_t n = mu.masses().size();
  const std::size_t length = mu.depth() + 1;
  std::vector<double> out(n * d);
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t w = 0; w < n; ++w) {
      const std::size_t aw = a * n + w;
      out[aw] = J.function().at_encoded(aw, length) * mu[w];
    }
  }
  return CylinderMeasure(mu.space(), length, std::move(out));
}

CylinderMeasure pushforward_apply(const CylinderMeasure& mu) {
  require(mu.depth() >= 1, "pushforward_apply needs a measure of depth >= 1");
  const std::size_t d = mu.space().alphabet();
  const std::size_t tails = mu.masses().size() / d;
  std::vector<double> out(tails, 0.0);
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t w = 0; w < tails; ++w) out[w] += mu[a * tails + w];
  }
  return CylinderMeasure(mu.space(), mu.depth() - 1, std::move(out));
}

ComposeResult compose_duals(std::span<const Jacobian> js, const CylinderMeasure& nu0) {
  require(!js.empty(), "compose_duals needs at least one Jacobian");
  const auto prefix = [&](std::size_t k) {
    CylinderMeasure rho = nu0;
    for (std::size_t i = k; i-- > 0;) rho = dual_apply(js[i], rho);
    return rho;
  };
  ComposeResult result{prefix(js.size()), {}};
  CylinderMeasure previous = nu0;
  for (std::size_t k = 1; k <= js.size(); ++k) {
    CylinderMeasure current = k == js.size() ? result.measure : prefix(k);
    result.gaps.push_back(w1_tree(previous.at_depth(current.depth()), current));
    previous = std::move(current);
  }
  return result;
}

}  // namespace mpt
