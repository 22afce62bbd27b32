#include "mpthermo/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

#include "mpthermo/rng.hpp"

namespace mpt {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kZeroMass = 1e-15;
constexpr std::size_t kMaxLatticeCells = std::size_t{1} << 26;

double entropy_term(double x) { return x < kZeroMass ? 0.0 : -x * std::log(x); }

struct Candidate {
  double value;
  ProbVector point;
};

std::size_t ipow(std::size_t base, std::size_t exp) {
  std::size_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) out *= base;
  return out;
}

// Builds a simplex point from its first d-1 coordinates, or nothing if the
// remaining mass is negative beyond rounding.
bool complete_point(std::vector<double>& x) {
  double partial = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    if (x[i] < -1e-15 || x[i] > 1.0 + 1e-15) return false;
    x[i] = std::clamp(x[i], 0.0, 1.0);
    partial += x[i];
  }
  double last = 1.0 - partial;
  if (last < -1e-13) return false;
  x.back() = std::max(last, 0.0);
  return true;
}

Candidate refine(const std::function<double(const ProbVector&)>& objective, const SimplexGrid& grid,
                 Candidate start) {
  const std::size_t d = grid.dimension;
  const std::size_t free_dims = d - 1;
  const std::size_t side = 2 * grid.refine_radius + 1;
  const std::size_t count = ipow(side, free_dims);
  const long radius = static_cast<long>(grid.refine_radius);
  double step = 1.0 / static_cast<double>(grid.resolution);
  Candidate best = std::move(start);
  std::vector<double> x(d);
  for (std::size_t round = 0; round < grid.refine_rounds; ++round) {
    const ProbVector center = best.point;
    for (std::size_t cell = 0; cell < count; ++cell) {
      std::size_t rest = cell;
      for (std::size_t i = 0; i < free_dims; ++i) {
        const long offset = static_cast<long>(rest % side) - radius;
        rest /= side;
        x[i] = center[i] + static_cast<double>(offset) * step;
      }
      if (!complete_point(x)) continue;
      ProbVector p(x);
      const double v = objective(p);
      if (v > best.value) best = Candidate{v, std::move(p)};
    }
    step *= grid.shrink;
  }
  return best;
}

std::vector<ProbVector> dedupe_equilibria(std::vector<Candidate> candidates, double best, double tol,
                                          double radius) {
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) { return a.value > b.value; });
  std::vector<ProbVector> out;
  for (auto& c : candidates) {
    if (c.value < best - tol) continue;
    const bool seen = std::any_of(out.begin(), out.end(), [&](const ProbVector& q) {
      return linf_distance(q, c.point) <= radius;
    });
    if (!seen) out.push_back(std::move(c.point));
  }
  return out;
}

}  // namespace

ProbVector::ProbVector(std::vector<double> masses) : masses_(std::move(masses)) {
  require(!masses_.empty(), "probability vector must have at least one coordinate");
  double total = 0.0;
  for (auto& m : masses_) {
    require(std::isfinite(m) && m >= -1e-15 && m <= 1.0 + 1e-15,
            "probability mass outside [0,1]: " + std::to_string(m));
    m = std::clamp(m, 0.0, 1.0);
    total += m;
  }
  require(std::abs(total - 1.0) <= 1e-12, "probability masses sum to " + std::to_string(total));
}

ProbVector ProbVector::uniform(std::size_t d) {
  require(d >= 1, "uniform vector needs d >= 1");
  return ProbVector(std::vector<double>(d, 1.0 / static_cast<double>(d)));
}

ProbVector ProbVector::point_mass(std::size_t d, std::size_t at) {
  require(at < d, "point mass index out of range");
  std::vector<double> m(d, 0.0);
  m[at] = 1.0;
  return ProbVector(std::move(m));
}

double linf_distance(const ProbVector& a, const ProbVector& b) {
  require(a.size() == b.size(), "dimension mismatch");
  double out = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) out = std::max(out, std::abs(a[i] - b[i]));
  return out;
}

double shannon_entropy(const ProbVector& p) {
  double h = 0.0;
  for (double x : p.masses()) h += entropy_term(x);
  return h;
}

double log_sum_exp(std::span<const double> x) {
  require(!x.empty(), "log_sum_exp of an empty list");
  const double m = *std::max_element(x.begin(), x.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double v : x) s += std::exp(v - m);
  return m + std::log(s);
}

double Level1Observable::integrate(const ProbVector& mu) const {
  require(coefficients.size() == mu.size(), "observable and measure dimensions differ");
  double s = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) s += coefficients[i] * mu[i];
  return s;
}

Level1Observable Level1Observable::shifted(double c) const {
  Level1Observable out = *this;
  for (auto& x : out.coefficients) x += c;
  return out;
}

Level2Observable inclusion_j(Level1Observable phi) {
  return [phi = std::move(phi)](const ProbVector& mu) { return phi.integrate(mu); };
}

Level2Density shannon_density() {
  return [](const ProbVector& p) { return MaxPlusValue(shannon_entropy(p)); };
}

Level2Density delta_density(ProbVector at) {
  return [at = std::move(at)](const ProbVector& p) {
    return linf_distance(at, p) <= 1e-12 ? MaxPlusValue::unit() : MaxPlusValue::bottom();
  };
}

ProbVector gibbs_solution(const Level1Observable& g) {
  require(!g.coefficients.empty(), "empty observable");
  const double z = log_sum_exp(g.coefficients);
  std::vector<double> p(g.coefficients.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::exp(g.coefficients[i] - z);
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  for (auto& x : p) x /= total;
  return ProbVector(std::move(p));
}

void SimplexGrid::validate() const {
  require(dimension >= 1, "simplex dimension must be >= 1");
  require(resolution >= 1, "grid resolution must be >= 1");
  require(shrink > 0.0 && shrink < 1.0, "refinement shrink factor must lie in (0,1)");
  require(top_k >= 1, "top_k must be >= 1");
  require(ipow(resolution + 1, dimension - 1) <= kMaxLatticeCells,
          "simplex lattice too large: (resolution+1)^(d-1) exceeds 2^26 cells");
}

double SimplexGrid::final_step() const {
  return std::pow(shrink, static_cast<double>(refine_rounds)) / static_cast<double>(resolution);
}

std::vector<ProbVector> SimplexGrid::points() const {
  validate();
  const std::size_t d = dimension;
  const std::size_t m = resolution;
  std::vector<ProbVector> out;
  std::vector<std::size_t> k(d, 0);
  std::vector<double> x(d);
  const std::size_t cells = ipow(m + 1, d - 1);
  for (std::size_t cell = 0; cell < cells; ++cell) {
    std::size_t rest = cell;
    std::size_t used = 0;
    for (std::size_t i = 0; i + 1 < d; ++i) {
      k[i] = rest % (m + 1);
      rest /= (m + 1);
      used += k[i];
    }
    if (used > m) continue;
    for (std::size_t i = 0; i + 1 < d; ++i) x[i] = static_cast<double>(k[i]) / static_cast<double>(m);
    x[d - 1] = static_cast<double>(m - used) / static_cast<double>(m);
    out.emplace_back(x);
  }
  return out;
}

EquilibriumSet maximize_on_simplex(const std::function<double(const ProbVector&)>& objective,
                                   const SimplexGrid& grid, double tol) {
  grid.validate();
  const std::size_t d = grid.dimension;
  const std::size_t m = grid.resolution;
  if (d == 1) {
    const ProbVector only = ProbVector::uniform(1);
    const double v = objective(only);
    require(v > kNegInf, "objective is -inf on every grid point");
    return EquilibriumSet{v, {only}};
  }

  const std::size_t side = m + 1;
  const std::size_t free_dims = d - 1;
  const std::size_t cells = ipow(side, free_dims);
  std::vector<std::size_t> stride(free_dims, 1);
  for (std::size_t i = 1; i < free_dims; ++i) stride[i] = stride[i - 1] * side;

  // Coarse scan over the lattice, laid out in a dense box; cells outside the
  // simplex stay at -inf.
  std::vector<double> values(cells, kNegInf);
  std::vector<std::size_t> k(free_dims);
  std::vector<double> x(d);
  for (std::size_t cell = 0; cell < cells; ++cell) {
    std::size_t rest = cell;
    std::size_t used = 0;
    for (std::size_t i = 0; i < free_dims; ++i) {
      k[i] = rest % side;
      rest /= side;
      used += k[i];
    }
    if (used > m) continue;
    for (std::size_t i = 0; i < free_dims; ++i) x[i] = static_cast<double>(k[i]) / static_cast<double>(m);
    x[d - 1] = static_cast<double>(m - used) / static_cast<double>(m);
    const double v = objective(ProbVector(x));
    require(!std::isnan(v), "objective returned NaN");
    values[cell] = v;
  }

  // Local maxima under unit mass transfers between any two coordinates.
  std::vector<std::pair<double, std::size_t>> maxima;
  for (std::size_t cell = 0; cell < cells; ++cell) {
    const double v = values[cell];
    if (!(v > kNegInf)) continue;
    std::size_t rest = cell;
    std::size_t used = 0;
    for (std::size_t i = 0; i < free_dims; ++i) {
      k[i] = rest % side;
      rest /= side;
      used += k[i];
    }
    const std::size_t last = m - used;
    bool is_max = true;
    // transfer with the implicit last coordinate
    for (std::size_t i = 0; i < free_dims && is_max; ++i) {
      if (last > 0 && values[cell + stride[i]] > v) is_max = false;
      if (k[i] > 0 && values[cell - stride[i]] > v) is_max = false;
    }
    // transfer between two free coordinates
    for (std::size_t i = 0; i < free_dims && is_max; ++i) {
      for (std::size_t j = 0; j < free_dims && is_max; ++j) {
        if (i == j || k[j] == 0) continue;
        if (values[cell + stride[i] - stride[j]] > v) is_max = false;
      }
    }
    if (is_max) maxima.emplace_back(v, cell);
  }
  require(!maxima.empty(), "objective is -inf on every grid point");
  std::stable_sort(maxima.begin(), maxima.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  if (maxima.size() > grid.top_k) maxima.resize(grid.top_k);

  std::vector<Candidate> refined;
  for (const auto& [v, cell] : maxima) {
    std::size_t rest = cell;
    std::size_t used = 0;
    for (std::size_t i = 0; i < free_dims; ++i) {
      k[i] = rest % side;
      rest /= side;
      used += k[i];
      x[i] = static_cast<double>(k[i]) / static_cast<double>(m);
    }
    x[d - 1] = static_cast<double>(m - used) / static_cast<double>(m);
    refined.push_back(refine(objective, grid, Candidate{v, ProbVector(x)}));
  }

  double best = kNegInf;
  for (const auto& c : refined) best = std::max(best, c.value);
  const double radius = std::max(1e-9, 10.0 * grid.final_step());
  return EquilibriumSet{best, dedupe_equilibria(std::move(refined), best, tol, radius)};
}

EquilibriumSet level2_pressure(const Level2Density& h, const Level2Observable& g,
                               const SimplexGrid& grid, double tol) {
  const auto objective = [&](const ProbVector& p) {
    const MaxPlusValue hv = h(p);
    if (hv.is_bottom()) return kNegInf;
    return odot(hv, MaxPlusValue(g(p))).value();
  };
  return maximize_on_simplex(objective, grid, tol);
}

double convex_pressure_gamma(const Level2Density& h, const Level1Observable& phi,
                             const SimplexGrid& grid) {
  require(phi.coefficients.size() == grid.dimension, "observable and grid dimensions differ");
  return level2_pressure(h, inclusion_j(phi), grid).value;
}

double ConvexPressureReport::worst() const {
  return std::max({monotonicity_violation, translation_residual, convexity_violation});
}

ConvexPressureReport pressure_axioms_C1C2C3(const Level2Density& h, const SimplexGrid& grid,
                                            std::size_t trials, std::uint64_t seed,
                                            double coefficient_scale) {
  Rng rng(seed);
  const std::size_t d = grid.dimension;
  const auto random_phi = [&] {
    Level1Observable phi;
    for (std::size_t i = 0; i < d; ++i) phi.coefficients.push_back(rng.uniform(-coefficient_scale, coefficient_scale));
    return phi;
  };
  ConvexPressureReport report;
  report.trials = trials;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const Level1Observable phi = random_phi();
    const Level1Observable other = random_phi();
    Level1Observable dominating = phi;
    for (auto& c : dominating.coefficients) c += rng.uniform(0.0, coefficient_scale);
    const double c = rng.uniform(-3.0, 3.0);
    const double t = rng.uniform();

    const double g_phi = convex_pressure_gamma(h, phi, grid);
    const double g_other = convex_pressure_gamma(h, other, grid);
    const double g_dom = convex_pressure_gamma(h, dominating, grid);
    const double g_shift = convex_pressure_gamma(h, phi.shifted(c), grid);
    Level1Observable mix;
    for (std::size_t i = 0; i < d; ++i) {
      mix.coefficients.push_back(t * phi.coefficients[i] + (1.0 - t) * other.coefficients[i]);
    }
    const double g_mix = convex_pressure_gamma(h, mix, grid);

    report.monotonicity_violation = std::max(report.monotonicity_violation, g_phi - g_dom);
    report.translation_residual = std::max(report.translation_residual, std::abs(g_shift - g_phi - c));
    report.convexity_violation =
        std::max(report.convexity_violation, g_mix - (t * g_phi + (1.0 - t) * g_other));
  }
  return report;
}

FamilyMinimum entropy_recovery(const Level2Density& h, const ProbVector& mu,
                               const std::vector<Level1Observable>& phi_family,
                               const SimplexGrid& grid) {
  require(!phi_family.empty(), "empty observable family");
  FamilyMinimum best{std::numeric_limits<double>::infinity(), 0};
  for (std::size_t i = 0; i < phi_family.size(); ++i) {
    const double v = convex_pressure_gamma(h, phi_family[i], grid) - phi_family[i].integrate(mu);
    if (v < best.value) best = FamilyMinimum{v, i};
  }
  return best;
}

std::vector<Level1Observable> coefficient_grid_family(std::size_t d, double lo, double hi,
                                                      std::size_t steps) {
  require(d >= 1 && steps >= 1 && hi >= lo, "invalid coefficient lattice");
  const std::size_t free_dims = d - 1;
  const std::size_t count = ipow(steps + 1, free_dims);
  std::vector<Level1Observable> out;
  out.reserve(count);
  for (std::size_t cell = 0; cell < count; ++cell) {
    Level1Observable phi;
    std::size_t rest = cell;
    for (std::size_t i = 0; i < free_dims; ++i) {
      const auto k = static_cast<double>(rest % (steps + 1));
      rest /= (steps + 1);
      phi.coefficients.push_back(lo + (hi - lo) * k / static_cast<double>(steps));
    }
    phi.coefficients.push_back(0.0);
    out.push_back(std::move(phi));
  }
  return out;
}

FamilyMinimum concave_density_identity(const Level2Density& h, const ProbVector& mu,
                                       const std::vector<Level2Observable>& g_family,
                                       const SimplexGrid& grid) {
  require(!g_family.empty(), "empty observable family");
  FamilyMinimum best{std::numeric_limits<double>::infinity(), 0};
  for (std::size_t i = 0; i < g_family.size(); ++i) {
    const double v = level2_pressure(h, g_family[i], grid).value - g_family[i](mu);
    if (v < best.value) best = FamilyMinimum{v, i};
  }
  return best;
}

std::vector<Level2Observable> affine_quadratic_family(double slope_lo, double slope_hi,
                                                      std::size_t slope_steps,
                                                      const std::vector<double>& curvatures,
                                                      std::size_t center_steps) {
  require(slope_steps >= 1 && center_steps >= 1, "family lattices need at least one step");
  std::vector<Level2Observable> out;
  for (std::size_t i = 0; i <= slope_steps; ++i) {
    const double a = slope_lo + (slope_hi - slope_lo) * static_cast<double>(i) / static_cast<double>(slope_steps);
    for (double b : curvatures) {
      const std::size_t centers = b == 0.0 ? 1 : center_steps + 1;
      for (std::size_t j = 0; j < centers; ++j) {
        const double c = static_cast<double>(j) / static_cast<double>(center_steps);
        out.emplace_back([a, b, c](const ProbVector& p) {
          require(p.size() == 2, "affine-quadratic family is defined on the 1-D simplex");
          return a * p[0] + b * (p[0] - c) * (p[0] - c);
        });
      }
    }
  }
  return out;
}

ConcaveEnvelope1D::ConcaveEnvelope1D(const Level2Density& h0, std::size_t grid_points) {
  require(grid_points >= 2, "envelope grid needs at least two points");
  const std::size_t n = grid_points - 1;
  // Andrew's monotone chain, upper hull only, over finite graph points.
  for (std::size_t i = 0; i <= n; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(n);
    const MaxPlusValue y = h0(ProbVector({x, 1.0 - x}));
    if (y.is_bottom()) continue;
    while (hull_x_.size() >= 2) {
      const std::size_t a = hull_x_.size() - 2;
      const std::size_t b = hull_x_.size() - 1;
      const double cross = (hull_x_[b] - hull_x_[a]) * (y.value() - hull_y_[a]) -
                           (hull_y_[b] - hull_y_[a]) * (x - hull_x_[a]);
      if (cross >= 0.0) {
        hull_x_.pop_back();
        hull_y_.pop_back();
      } else {
        break;
      }
    }
    hull_x_.push_back(x);
    hull_y_.push_back(y.value());
  }
  require(!hull_x_.empty(), "density has empty support on the envelope grid");
}

MaxPlusValue ConcaveEnvelope1D::operator()(const ProbVector& p) const {
  require(p.size() == 2, "concave envelope is defined on the 1-D simplex");
  const double x = p[0];
  if (x < hull_x_.front() - 1e-15 || x > hull_x_.back() + 1e-15) return MaxPlusValue::bottom();
  if (hull_x_.size() == 1) return MaxPlusValue(hull_y_.front());
  auto it = std::upper_bound(hull_x_.begin(), hull_x_.end(), x);
  std::size_t hi = std::min<std::size_t>(static_cast<std::size_t>(it - hull_x_.begin()), hull_x_.size() - 1);
  if (hi == 0) hi = 1;
  const std::size_t lo = hi - 1;
  const double w = (x - hull_x_[lo]) / (hull_x_[hi] - hull_x_[lo]);
  return MaxPlusValue((1.0 - w) * hull_y_[lo] + w * hull_y_[hi]);
}

Level2Density ConcaveEnvelope1D::as_density() const {
  return [env = *this](const ProbVector& p) { return env(p); };
}

ProbVector stationary_distribution(const std::vector<ProbVector>& rows) {
  const std::size_t d = rows.size();
  require(d >= 1, "empty transition matrix");
  for (const auto& r : rows) require(r.size() == d, "transition matrix must be square");
  if (d == 1) return ProbVector::uniform(1);
  if (d == 2) {
    const double a = rows[0][1];
    const double b = rows[1][0];
    if (a + b <= 1e-300) return ProbVector::uniform(2);
    return ProbVector({b / (a + b), a / (a + b)});
  }
  // Solve pi (P - I) = 0 with sum(pi) = 1 by Gaussian elimination on the
  // transposed system, replacing the last equation by the normalization.
  std::vector<std::vector<double>> a(d, std::vector<double>(d + 1, 0.0));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) a[i][j] = rows[j][i] - (i == j ? 1.0 : 0.0);
  }
  for (std::size_t j = 0; j < d; ++j) a[d - 1][j] = 1.0;
  a[d - 1][d] = 1.0;
  bool singular = false;
  for (std::size_t col = 0; col < d && !singular; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < d; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (std::abs(a[pivot][col]) < 1e-12) {
      singular = true;
      break;
    }
    std::swap(a[col], a[pivot]);
    for (std::size_t r = 0; r < d; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c <= d; ++c) a[r][c] -= f * a[col][c];
    }
  }
  std::vector<double> pi(d, 0.0);
  if (!singular) {
    double total = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      pi[i] = std::max(0.0, a[i][d] / a[i][i]);
      total += pi[i];
    }
    for (auto& x : pi) x /= total;
    return ProbVector(std::move(pi));
  }
  // reducible chain: Cesaro average of the uniform start
  std::vector<double> cur(d, 1.0 / static_cast<double>(d));
  std::vector<double> next(d);
  constexpr int kSteps = 4096;
  for (int s = 0; s < kSteps; ++s) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) next[j] += cur[i] * rows[i][j];
    }
    cur.swap(next);
    for (std::size_t i = 0; i < d; ++i) pi[i] += cur[i];
  }
  double total = std::accumulate(pi.begin(), pi.end(), 0.0);
  for (auto& x : pi) x /= total;
  return ProbVector(std::move(pi));
}

MarkovMeasure MarkovMeasure::bernoulli(const ProbVector& p) {
  return MarkovMeasure{std::vector<ProbVector>(p.size(), p), p};
}

MarkovMeasure MarkovMeasure::from_rows(std::vector<ProbVector> rows) {
  ProbVector pi = stationary_distribution(rows);
  return MarkovMeasure{std::move(rows), std::move(pi)};
}

double MarkovMeasure::ks_entropy() const {
  double h = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) h += stationary[i] * shannon_entropy(rows[i]);
  return h;
}

double MarkovMeasure::integrate(const Level1Observable& a) const { return a.integrate(stationary); }

namespace {

double nonlinear_objective(const NonlinearSpec& spec, const MarkovMeasure& mu) {
  const double x = mu.integrate(spec.A);
  const double fx = spec.F(x);
  require(std::isfinite(fx), "F is not finite at integral of A = " + std::to_string(x));
  return mu.ks_entropy() + fx;
}

// Product of d simplices (the rows of a transition matrix). Coarse product
// lattice, then block-coordinate refinement of one row at a time.
NonlinearResult maximize_markov(const NonlinearSpec& spec, const SimplexGrid& grid, double tol) {
  const std::size_t d = grid.dimension;
  SimplexGrid row_grid = grid;
  const std::vector<ProbVector> row_points = row_grid.points();
  const std::size_t per_row = row_points.size();
  const std::size_t total = ipow(per_row, d);
  require(total <= kMaxLatticeCells, "Markov lattice too large; lower the resolution");

  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(total);
  std::vector<ProbVector> rows(d, row_points.front());
  for (std::size_t cell = 0; cell < total; ++cell) {
    std::size_t rest = cell;
    for (std::size_t i = 0; i < d; ++i) {
      rows[i] = row_points[rest % per_row];
      rest /= per_row;
    }
    scored.emplace_back(nonlinear_objective(spec, MarkovMeasure::from_rows(rows)), cell);
  }
  std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

  // distinct starting cells: greedy exclusion at three lattice steps
  const double exclusion = 3.0 / static_cast<double>(grid.resolution);
  std::vector<std::vector<ProbVector>> starts;
  for (const auto& [v, cell] : scored) {
    if (starts.size() >= grid.top_k) break;
    std::vector<ProbVector> cand;
    std::size_t rest = cell;
    for (std::size_t i = 0; i < d; ++i) {
      cand.push_back(row_points[rest % per_row]);
      rest /= per_row;
    }
    const bool near = std::any_of(starts.begin(), starts.end(), [&](const auto& s) {
      double dist = 0.0;
      for (std::size_t i = 0; i < d; ++i) dist = std::max(dist, linf_distance(s[i], cand[i]));
      return dist <= exclusion;
    });
    if (!near) starts.push_back(std::move(cand));
  }

  struct MarkovCandidate {
    double value;
    std::vector<ProbVector> rows;
  };
  std::vector<MarkovCandidate> refined;
  for (auto start : starts) {
    for (std::size_t sweep = 0; sweep < 2; ++sweep) {
      for (std::size_t i = 0; i < d; ++i) {
        const auto row_objective = [&](const ProbVector& row) {
          auto trial = start;
          trial[i] = row;
          return nonlinear_objective(spec, MarkovMeasure::from_rows(std::move(trial)));
        };
        SimplexGrid local = grid;
        Candidate c{row_objective(start[i]), start[i]};
        c = refine(row_objective, local, std::move(c));
        start[i] = std::move(c.point);
      }
    }
    const double v = nonlinear_objective(spec, MarkovMeasure::from_rows(start));
    refined.push_back(MarkovCandidate{v, std::move(start)});
  }

  double best = -std::numeric_limits<double>::infinity();
  for (const auto& c : refined) best = std::max(best, c.value);
  std::sort(refined.begin(), refined.end(), [](const auto& a, const auto& b) { return a.value > b.value; });
  NonlinearResult out{best, {}};
  const double radius = std::max(1e-9, 10.0 * grid.final_step());
  for (auto& c : refined) {
    if (c.value < best - tol) continue;
    auto mu = MarkovMeasure::from_rows(std::move(c.rows));
    const bool seen = std::any_of(out.maximizers.begin(), out.maximizers.end(), [&](const MarkovMeasure& q) {
      double dist = 0.0;
      for (std::size_t i = 0; i < d; ++i) dist = std::max(dist, linf_distance(q.rows[i], mu.rows[i]));
      return dist <= radius;
    });
    if (!seen) out.maximizers.push_back(std::move(mu));
  }
  return out;
}

}  // namespace

NonlinearResult nonlinear_pressure(const NonlinearSpec& spec, MeasureFamily family,
                                   const SimplexGrid& grid, double tol) {
  require(static_cast<bool>(spec.F), "nonlinear pressure needs F");
  require(spec.A.coefficients.size() == grid.dimension, "potential and grid dimensions differ");
  for (double a : spec.A.coefficients) require(std::isfinite(a), "potential must be finite");
  if (family == MeasureFamily::Markov) return maximize_markov(spec, grid, tol);

  const auto objective = [&](const ProbVector& p) {
    return nonlinear_objective(spec, MarkovMeasure::bernoulli(p));
  };
  EquilibriumSet eq = maximize_on_simplex(objective, grid, tol);
  NonlinearResult out{eq.value, {}};
  for (const auto& p : eq.equilibria) out.maximizers.push_back(MarkovMeasure::bernoulli(p));
  return out;
}

}  // namespace mpt
