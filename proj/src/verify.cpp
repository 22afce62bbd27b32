#include "mpthermo/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <sstream>

#include "mpthermo/dynamics.hpp"
#include "mpthermo/ifs.hpp"
#include "mpthermo/mpifs.hpp"
#include "mpthermo/rng.hpp"
#include "mpthermo/shift.hpp"
#include "mpthermo/simplex.hpp"
#include "mpthermo/transport.hpp"

namespace mpt {

namespace {

std::string g3(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

std::string format_p(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[violated: " << what << "] ";
    }
  }
};

Level1Observable random_level1(std::size_t d, double scale, Rng& rng) {
  Level1Observable g;
  for (std::size_t i = 0; i < d; ++i) g.coefficients.push_back(rng.uniform(-scale, scale));
  return g;
}

void gibbs_equilibrium(Outcome& out) {
  Rng rng(101);
  double worst_point = 0.0, worst_value = 0.0;
  for (std::size_t trial = 0; trial < 50; ++trial) {
    const std::size_t d = trial % 2 == 0 ? 2 : 3;
    SimplexGrid grid;
    grid.dimension = d;
    grid.resolution = d == 2 ? 400 : 120;
    const Level1Observable g = random_level1(d, 2.0, rng);
    const auto eq = level2_pressure(shannon_density(), inclusion_j(g), grid);
    const ProbVector soft = gibbs_solution(g);
    out.check(!eq.equilibria.empty(), "no equilibrium found");
    for (const auto& p : eq.equilibria) worst_point = std::max(worst_point, linf_distance(p, soft));
    worst_value = std::max(worst_value, std::abs(eq.value - log_sum_exp(g.coefficients)));
  }
  out.check(worst_point <= 1e-3, "argmax within 1e-3 of softmax");
  out.check(worst_value <= 1e-4, "pressure within 1e-4 of log-sum-exp");
  out.detail << "50 trials, max |argmax - softmax|_inf=" << g3(worst_point) << ", max |value - lse|=" << g3(worst_value);
}

void transport_oracle(Outcome& out) {
  Rng rng(202);
  double worst = 0.0, worst_gap = 0.0, worst_lip = 0.0;
  for (std::size_t trial = 0; trial < 200; ++trial) {
    const std::size_t d = trial % 2 == 0 ? 2 : 3;
    const ShiftSpace space(d, d == 2 ? 0.3 : 0.2);
    const std::size_t depth = 1 + rng.index(5);
    const auto mu = CylinderMeasure::random(space, depth, rng);
    const auto nu = CylinderMeasure::random(space, depth, rng);
    const auto lp = w1_lp_oracle(mu, nu);
    worst = std::max(worst, std::abs(w1_tree(mu, nu) - lp.value));
    worst_gap = std::max(worst_gap, lp.value - lp.dual_value);
    worst_lip = std::max(worst_lip, lipschitz_constant(*lp.potential, space));
  }
  out.check(worst <= 1e-9, "tree and LP values within 1e-9");
  out.check(worst_gap <= 1e-9, "dual certificate within 1e-9");
  out.check(worst_lip <= 1.0 + 1e-9, "potential 1-Lipschitz");
  out.detail << "200 pairs, max |tree - lp|=" << g3(worst) << ", max duality gap=" << g3(worst_gap)
             << ", max potential Lip=" << g3(worst_lip);
}

void contraction_theorems(Outcome& out) {
  const auto a = run_contraction_trials(ShiftSpace(2, 0.3), 4, 1000, 303);
  const auto b = run_contraction_trials(ShiftSpace(3, 0.2), 3, 1000, 304);
  out.check(a.violations() == 0 && b.violations() == 0, "no bound violations");
  out.detail << "2x1000 trials, violations=" << a.violations() + b.violations() << ", max ratio " << g3(a.max_ratio)
             << " (r=" << g3(a.rate) << "), " << g3(b.max_ratio) << " (r=" << g3(b.rate) << ")";
}

void section_identity(Outcome& out) {
  Rng rng(404);
  double worst = 0.0;
  for (std::size_t trial = 0; trial < 1000; ++trial) {
    const std::size_t d = 2 + trial % 2;
    const ShiftSpace space(d, 0.9 / static_cast<double>(d + 1));
    const std::size_t depth = rng.index(5);
    const auto mu = CylinderMeasure::random(space, depth, rng);
    const Jacobian J = random_jacobian(space, 1 + rng.index(depth + 1), rng);
    const auto back = pushforward_apply(dual_apply(J, mu));
    for (std::size_t w = 0; w < mu.masses().size(); ++w) worst = std::max(worst, std::abs(back[w] - mu[w]));
  }
  out.check(worst <= 1e-12, "pushforward of the dual is the identity");
  out.detail << "1000 pairs, max deviation=" << g3(worst);
}

void product_formula(Outcome& out) {
  const ShiftSpace space(2, 0.3);
  const std::vector<Jacobian> js{make_bernoulli_jacobian(0.3, space), make_bernoulli_jacobian(0.6, space)};
  Rng rng(505);
  const std::vector<CylinderMeasure> starts{CylinderMeasure::trivial(space), CylinderMeasure::uniform(space, 2),
                                            CylinderMeasure::random(space, 3, rng)};
  const double expected[4] = {0.18, 0.12, 0.42, 0.28};
  double worst = 0.0;
  for (const auto& nu0 : starts) {
    const auto m = compose_duals(js, nu0).measure.coarsen(2);
    for (std::size_t w = 0; w < 4; ++w) worst = std::max(worst, std::abs(m[w] - expected[w]));
  }
  out.check(worst <= 1e-12, "masses (0.18, 0.12, 0.42, 0.28)");

  // pushforward of a product drops the first factor; the result equals the
  // marginal only when the factors agree
  bool iff_constant = true;
  const double ps[] = {0.3, 0.6, 0.5};
  for (double p1 : ps) {
    for (double p2 : ps) {
      const auto mu = CylinderMeasure::product(space, {{p1, 1 - p1}, {p2, 1 - p2}, {p2, 1 - p2}});
      const auto pushed = pushforward_apply(mu);
      double dev = 0.0;
      for (std::size_t w = 0; w < 4; ++w) dev = std::max(dev, std::abs(pushed[w] - mu.coarsen(2)[w]));
      if ((dev <= 1e-12) != (p1 == p2)) iff_constant = false;
    }
  }
  out.check(iff_constant, "invariance exactly for constant p");
  out.detail << "3 initial measures, max mass error=" << g3(worst) << ", invariance iff constant p: "
             << (iff_constant ? "yes" : "no");
}

void invariant_ifs_pressure(Outcome& out) {
  const ShiftSpace space(2, 0.2);
  const double r = space.contraction_rate();
  Rng rng(606);
  const double p = 0.3;
  const Jacobian Jp = make_bernoulli_jacobian(p, space);

  const std::vector<Jacobian> constant(12, Jp);
  const auto nu0 = CylinderMeasure::random(space, 2, rng);
  const auto traced = compose_duals(constant, nu0);
  double worst_factor = 0.0;
  bool decays = true;
  for (std::size_t k = 0; k + 1 < traced.gaps.size(); ++k) {
    if (traced.gaps[k + 1] > r * traced.gaps[k] + 1e-15) decays = false;
    if (traced.gaps[k] > 0) worst_factor = std::max(worst_factor, traced.gaps[k + 1] / traced.gaps[k]);
  }
  std::vector<std::vector<double>> rows(traced.measure.depth(), {p, 1 - p});
  const double to_bernoulli = w1_tree(traced.measure, CylinderMeasure::product(space, rows));
  out.check(decays, "gap decays by at most r per step");
  out.check(to_bernoulli <= std::pow(r, 12.0), "converges to Bernoulli(p)");

  const WeightedJacobianFamily two(space, {make_bernoulli_jacobian(0.3, space), make_bernoulli_jacobian(0.7, space)},
                                   {0.0, -1.0});
  const MeasureObservable zero = [](const CylinderMeasure&) { return 0.0; };
  const MeasureObservable first = [](const CylinderMeasure& m) { return m.coarsen(1)[0]; };
  const auto ell0 = invariant_pressure_solve(two, zero, 0.0, 8, CylinderMeasure::trivial(space));
  out.check(ell0.value == 0.0, "l(0) = 0 exactly");

  const WeightedJacobianFamily single(space, {Jp}, {0.0});
  const auto ellp = invariant_pressure_solve(single, first, 1.0, 10, nu0);
  out.check(std::abs(ellp.value - p) <= ellp.error_bound, "single map l(g) = p");

  const std::size_t N = 8;
  AttractorOptions opts;
  opts.measure_depth = N;
  opts.merge = false;
  const auto sa = attractor_build(two, N, CylinderMeasure::trivial(space), opts);
  const auto sb = attractor_build(two, N, nu0, opts);
  double leaf_shift = 0.0;
  for (std::size_t i = 0; i < sa.leaves.size(); ++i) {
    leaf_shift = std::max(leaf_shift, w1_tree(sa.leaves[i].measure, sb.leaves[i].measure));
  }
  const double rN = std::pow(r, static_cast<double>(N));
  const auto la = invariant_pressure_solve(two, first, 1.0, N, CylinderMeasure::trivial(space), opts);
  const auto lb = invariant_pressure_solve(two, first, 1.0, N, nu0, opts);
  out.check(leaf_shift <= rN + 1e-15, "leaves move by at most r^N");
  out.check(std::abs(la.value - lb.value) <= rN + 1e-15, "pressure moves by at most L_g r^N");

  bool exact = true;
  for (std::size_t n : {std::size_t{6}, std::size_t{10}}) {
    const auto start = CylinderMeasure::uniform(space, 1);
    AttractorOptions o;
    o.merge = false;
    const auto sample = attractor_build(two, n, start, o);
    const auto cmp = compare_with_brute_force(two, n, start, sample);
    if (!cmp.bitwise_equal || cmp.leaves != (std::size_t{1} << n)) exact = false;
  }
  out.check(exact, "enumeration equals brute force bit for bit");
  out.detail << "max gap factor=" << g3(worst_factor) << " (r=" << g3(r) << "), W1 to Bernoulli=" << g3(to_bernoulli)
             << ", l(0)=" << ell0.value << ", nu0 shift=" << g3(leaf_shift) << " (r^N=" << g3(rN)
             << "), brute force " << (exact ? "identical" : "differs");
}

void mpifs_duality(Outcome& out) {
  Rng rng(707);
  double duality = 0.0;
  std::size_t disagreements = 0, fixed_failures = 0, random_passes = 0;
  for (std::size_t trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.index(50);
    const std::size_t k = 1 + rng.index(5);
    const MpIFSSystem sys = random_mpifs(n, k, rng);
    PointDensity lambda(n);
    for (auto& v : lambda) v = rng.uniform() < 0.2 ? MaxPlusValue::bottom() : MaxPlusValue(-rng.uniform(0.0, 4.0));
    lambda[rng.index(n)] = MaxPlusValue(0.0);
    std::vector<PointTable> fs;
    for (int j = 0; j < 5; ++j) {
      PointTable f(n);
      for (auto& x : f) x = rng.uniform(-3.0, 3.0);
      fs.push_back(f);
      const MaxPlusValue m = markov_apply(lambda, f, sys);
      duality = std::max(duality, residual(m, pressure_of(lambda, mpifs_ruelle(f, sys))));
      duality = std::max(duality, residual(m, pressure_of(mpifs_transfer(lambda, sys), f)));
    }
    const auto random_report = mpifs_invariance_check(lambda, sys, fs);
    if (!random_report.agree()) ++disagreements;
    if (random_report.all_hold()) ++random_passes;
    const auto fixed_report = mpifs_invariance_check(mpifs_limit_density(sys), sys, fs);
    if (!fixed_report.agree()) ++disagreements;
    if (!fixed_report.all_hold()) ++fixed_failures;

    // constant-map systems: plain value iteration reaches the fixed point
    std::vector<std::vector<double>> q(n, std::vector<double>(n));
    for (auto& row : q) {
      for (auto& x : row) x = -rng.uniform(0.0, 3.0);
    }
    for (std::size_t eta = 0; eta < n; ++eta) q[rng.index(n)][eta] = 0.0;
    const MpIFSSystem constant = constant_map_system(q);
    const auto vi = mpifs_value_iteration(constant);
    const auto vi_report = mpifs_invariance_check(vi.density, constant, {});
    if (!vi_report.agree()) ++disagreements;
    if (!vi.converged || !vi_report.all_hold()) ++fixed_failures;
  }
  out.check(duality <= 1e-12, "M(l)(f) = l(Lf)");
  out.check(disagreements == 0, "three invariance conditions agree");
  out.check(fixed_failures == 0, "limit densities and value-iteration fixed points are invariant");

  double inverse = 0.0;
  for (std::size_t trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + rng.index(50);
    PointTable h(n);
    for (auto& x : h) x = -rng.uniform(0.0, 5.0);
    h[rng.index(n)] = 0.0;
    const auto sol = inverse_problem_solve(h);
    inverse = std::max({inverse, sol.fixed_point_residual, sol.pointwise_normalization, sol.family_normalization});
  }
  const auto example = inverse_problem_solve({0.0, -1.0, -2.0});
  inverse = std::max(inverse, example.fixed_point_residual);
  out.check(inverse == 0.0, "inverse-problem residual exactly 0");
  out.detail << "100 systems, duality residual=" << g3(duality) << ", disagreements=" << disagreements
             << ", random densities invariant=" << random_passes << ", inverse residual=" << g3(inverse);
}

void ldp_example(Outcome& out) {
  double cyl = 0.0;
  for (double p : {0.5, 0.3}) {
    const auto ex = BernoulliExample::make(p);
    for (std::size_t n = 1; n <= 20; ++n) {
      for (double t : {0.0, 0.2, std::log(2.0), 1.5}) {
        const double direct = partition_integral_cylinders(ex.measure, ex.f, -t, n);
        cyl = std::max(cyl, std::abs(direct - partition_function_exact(p, -t, n).integral));
      }
    }
  }
  out.check(cyl <= 1e-10, "cylinder sums match the closed form");

  double limit = 0.0;
  for (double p : {0.5, 0.3}) {
    for (double t : {0.0, 0.2, 0.5, 1.0, 2.0}) {
      limit = std::max(limit, std::abs(partition_function_exact(p, -t, 2000).c - partition_limit(p, -t)));
    }
  }
  out.check(limit <= 0.01, "c_2000(-t) within 0.01 of max(-t, log p)");

  double bound_err = 0.0, t_err = 0.0, rate_err = 0.0;
  bool strict = true;
  for (double p : {0.5, 0.3, 0.8}) {
    for (double b : {0.25, 0.5, 0.75}) {
      const auto est = empirical_rate(p, b, {1, 5, 10, 20, 100, 2000});
      bound_err = std::max(bound_err, std::abs(est.bound.bound - (1 - b) * std::log(p)));
      t_err = std::max(t_err, std::abs(est.bound.t_star + std::log(p)));
      for (double rate : est.rates) rate_err = std::max(rate_err, std::abs(rate - std::log(p)));
      if (!(est.limsup < est.bound.bound)) strict = false;
    }
  }
  out.check(bound_err <= 1e-8 && t_err <= 1e-8, "bound (1-b) log p at t* = -log p");
  out.check(rate_err <= 1e-12, "empirical rate equals log p");
  out.check(strict, "strict gap log p < (1-b) log p");
  out.detail << "cylinder error=" << g3(cyl) << ", n=2000 limit error=" << g3(limit) << ", bound error=" << g3(bound_err)
             << ", t* error=" << g3(t_err) << ", rate error=" << g3(rate_err);
}

void birkhoff_limit(Outcome& out) {
  const auto ex = BernoulliExample::make(0.5);
  const OrbitSampler sampler(ex.measure, 909);
  const auto rep = birkhoff_limit_test(sampler, ex.f, 100, 10000);
  out.check(rep.attained == rep.orbits, "every orbit attains sup f");
  const std::size_t latest = *std::max_element(rep.first_hit.begin(), rep.first_hit.end());
  out.detail << rep.attained << "/" << rep.orbits << " orbits attain sup f (latest first hit at step " << latest
             << "); per-orbit miss probability p^10000 = 10^" << g3(rep.log_miss_probability / std::log(10.0));
}

MaxPlusValue two_bump(const ProbVector& p) {
  return MaxPlusValue(std::max(-20.0 * (p[0] - 0.2) * (p[0] - 0.2), -20.0 * (p[0] - 0.8) * (p[0] - 0.8)));
}

void convex_pressure_suite(Outcome& out) {
  SimplexGrid grid;
  grid.dimension = 2;
  grid.resolution = 400;
  const Level2Density bumps = two_bump;
  const auto shannon_report = pressure_axioms_C1C2C3(shannon_density(), grid, 40, 1001);
  const auto bump_report = pressure_axioms_C1C2C3(bumps, grid, 40, 1002);
  SimplexGrid grid3 = grid;
  grid3.dimension = 3;
  grid3.resolution = 120;
  const auto shannon3 = pressure_axioms_C1C2C3(shannon_density(), grid3, 20, 1003);
  const double axioms = std::max({shannon_report.worst(), bump_report.worst(), shannon3.worst()});
  out.check(axioms <= 1e-6, "C1-C3 residuals <= 1e-6");

  const auto family = coefficient_grid_family(2, -3.0, 3.0, 60);
  double below = -std::numeric_limits<double>::infinity();
  for (int i = 1; i < 10; ++i) {
    const double x = i / 10.0;
    const ProbVector mu({x, 1 - x});
    const double upper = entropy_recovery(bumps, mu, family, grid).value;
    below = std::max(below, bumps(mu).value() - upper);
  }
  out.check(below <= 1e-6, "h <= recovered entropy pointwise");

  const Level1Observable phi{{0.5, 0.0}};
  const ProbVector mu = gibbs_solution(phi);
  const double recovered = entropy_recovery(shannon_density(), mu, coefficient_grid_family(2, -2.0, 2.0, 40), grid).value;
  const double shannon_err = std::abs(recovered - shannon_entropy(mu));
  out.check(shannon_err <= 1e-4, "Shannon entropy recovered within 1e-4");

  const ConcaveEnvelope1D envelope(bumps, 10001);
  const Level2Density env = envelope.as_density();
  Rng rng(1004);
  double gamma_gap = 0.0;
  for (int i = 0; i < 20; ++i) {
    const Level1Observable g = random_level1(2, 2.0, rng);
    gamma_gap = std::max(gamma_gap, std::abs(convex_pressure_gamma(bumps, g, grid) - convex_pressure_gamma(env, g, grid)));
  }
  out.check(gamma_gap <= 1e-6, "Gamma of two-bump density equals Gamma of its envelope");
  out.detail << "axiom residual=" << g3(axioms) << ", max h - recovered=" << g3(below) << ", Shannon error="
             << g3(shannon_err) << ", Gamma gap=" << g3(gamma_gap);
}

void nonlinear_quadratic(Outcome& out) {
  SimplexGrid grid;
  grid.dimension = 2;
  grid.resolution = 400;
  const NonlinearSpec spec{[](double x) { return 2.0 * x * x; }, Level1Observable{{1.0, -1.0}}};
  const auto res = nonlinear_pressure(spec, MeasureFamily::Bernoulli, grid);
  out.check(res.maximizers.size() >= 2, "at least two maximizers");
  bool swapped = false, uniform_in = false;
  for (const auto& a : res.maximizers) {
    if (std::abs(a.rows[0][0] - 0.5) < 1e-3) uniform_in = true;
    for (const auto& b : res.maximizers) {
      if (std::abs(a.rows[0][0] - b.rows[0][1]) <= 1e-6 && std::abs(a.rows[0][0] - b.rows[0][0]) > 0.1) swapped = true;
    }
  }
  out.check(swapped, "maximizers swapped by symbol exchange");
  out.check(!uniform_in, "uniform is not a maximizer");
  // the midpoint of the symmetric pair is the uniform measure, which scores strictly lower
  const auto uniform = MarkovMeasure::bernoulli(ProbVector::uniform(2));
  const double mid = uniform.ks_entropy() + spec.F(uniform.integrate(spec.A));
  out.check(mid < res.value - 1e-3, "equilibrium set not convex");
  out.detail << res.maximizers.size() << " maximizers, p1 = ";
  for (const auto& m : res.maximizers) out.detail << format_p(m.rows[0][0]) << " ";
  out.detail << "value=" << g3(res.value) << ", midpoint value=" << g3(mid);
}

struct Entry {
  const char* name;
  void (*run)(Outcome&);
};

const Entry kEntries[kCriterionCount] = {
    {"Gibbs equilibrium", gibbs_equilibrium},
    {"transport oracle equivalence", transport_oracle},
    {"contraction theorems", contraction_theorems},
    {"section identity", section_identity},
    {"inhomogeneous product formula", product_formula},
    {"invariant IFS pressure", invariant_ifs_pressure},
    {"mpIFS duality and invariance", mpifs_duality},
    {"LDP worked example", ldp_example},
    {"max-plus Birkhoff limit", birkhoff_limit},
    {"convex-pressure suite", convex_pressure_suite},
    {"nonlinear quadratic pressure", nonlinear_quadratic},
};

}  // namespace

CriterionResult run_criterion(int id) {
  require(id >= 1 && id <= kCriterionCount, "criterion id must lie in 1.." + std::to_string(kCriterionCount));
  const Entry& e = kEntries[id - 1];
  CriterionResult r{id, e.name, false, "", 0.0};
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    e.run(out);
    r.pass = out.pass;
    r.detail = out.detail.str();
  } catch (const std::exception& ex) {
    r.pass = false;
    r.detail = out.detail.str() + "exception: " + ex.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::vector<CriterionResult> run_battery(const std::vector<int>& ids) {
  std::vector<CriterionResult> out;
  if (ids.empty()) {
    for (int i = 1; i <= kCriterionCount; ++i) out.push_back(run_criterion(i));
  } else {
    for (int i : ids) out.push_back(run_criterion(i));
  }
  return out;
}

std::string format_result(const CriterionResult& r) {
  char head[96];
  std::snprintf(head, sizeof head, "%s  %2d  %-30s %7.2fs  ", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(), r.seconds);
  return head + r.detail;
}

}  // namespace mpt
