// Experiment runner: one subcommand per module, flat key=value config files,
// deterministic CSV/JSON output with the resolved config embedded.
#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "mpthermo/dynamics.hpp"
#include "mpthermo/ifs.hpp"
#include "mpthermo/io.hpp"
#include "mpthermo/mpifs.hpp"
#include "mpthermo/rng.hpp"
#include "mpthermo/simplex.hpp"
#include "mpthermo/transport.hpp"
#include "mpthermo/verify.hpp"

namespace {

using mpt::format_double;

constexpr int kExitPrecondition = 1;
constexpr int kExitAssertion = 2;

std::vector<double> parse_list(const std::string& text, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      mpt::require(item.find_first_not_of(" \t", used) == std::string::npos, "");
    } catch (const std::exception&) {
      throw mpt::PreconditionError("--" + key + ": '" + item + "' is not a number");
    }
  }
  mpt::require(!out.empty(), "--" + key + " needs at least one value");
  return out;
}

std::vector<std::size_t> parse_counts(const std::string& text, const std::string& key) {
  std::vector<std::size_t> out;
  for (double v : parse_list(text, key)) {
    mpt::require(v >= 1 && v == std::floor(v), "--" + key + " entries must be positive integers");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

std::string join(const std::vector<double>& xs, const char* sep = " ") {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? sep : "") + format_double(xs[i]);
  return out;
}

// Reads key=value lines ('#' starts a comment) into "--key value" arguments.
std::vector<std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  mpt::require(static_cast<bool>(in), "cannot open config file " + path);
  std::vector<std::string> args;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    const auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    if (trim(line).empty()) continue;
    mpt::require(eq != std::string::npos, "config line without '=': " + line);
    args.push_back("--" + trim(line.substr(0, eq)));
    args.push_back(trim(line.substr(eq + 1)));
  }
  return args;
}

mpt::ConfigMap resolved_config(const CLI::App& app, const CLI::App& sub) {
  mpt::ConfigMap config{{"subcommand", sub.get_name()}};
  for (const CLI::App* scope : {&app, &sub}) {
    for (const CLI::Option* opt : scope->get_options()) {
      if (opt->get_lnames().empty()) continue;
      const std::string name = opt->get_lnames().front();
      // destinations are not experiment settings; keep them out so reruns compare equal
      if (name == "help" || name == "config" || name == "out" || name == "json") continue;
      config[name] = opt->count() ? opt->as<std::string>() : opt->get_default_str();
    }
  }
  return config;
}

struct Output {
  std::string path;

  template <typename Write>
  void write(Write&& body) const {
    if (path.empty()) return;
    std::ofstream os(path);
    mpt::require(static_cast<bool>(os), "cannot write output file " + path);
    body(os);
  }
};

mpt::Level2Density density_by_name(const std::string& name, std::size_t d) {
  if (name == "shannon") return mpt::shannon_density();
  if (name == "two-bump") {
    mpt::require(d == 2, "the two-bump density is defined for d = 2");
    return [](const mpt::ProbVector& p) {
      return mpt::MaxPlusValue(std::max(-20.0 * (p[0] - 0.2) * (p[0] - 0.2), -20.0 * (p[0] - 0.8) * (p[0] - 0.8)));
    };
  }
  throw mpt::PreconditionError("unknown density '" + name + "' (expected shannon or two-bump)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Max-plus thermodynamic formalism experiments"};
  app.option_defaults()->always_capture_default()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  Output output;
  std::uint64_t seed = 1;
  app.add_option("--config", config_path, "flat key=value file; command-line flags override it");
  app.add_option("--out", output.path, "CSV/JSON output path");
  app.add_option("--seed", seed, "random seed");

  // pressure
  auto* pressure = app.add_subcommand("pressure", "level-2 pressure and equilibria on the simplex");
  std::size_t p_d = 2, p_res = 400;
  std::string p_g = "0.5,0", p_density = "shannon";
  pressure->add_option("--d", p_d, "alphabet size");
  pressure->add_option("--g", p_g, "level-1 potential coefficients, comma separated");
  pressure->add_option("--density", p_density, "shannon | two-bump");
  pressure->add_option("--resolution", p_res, "coarse lattice resolution");

  // gamma
  auto* gamma = app.add_subcommand("gamma", "convex pressure projection and entropy recovery");
  std::size_t g_d = 2, g_res = 400, g_steps = 60;
  std::string g_phi = "0.5,0", g_mu = "0.6,0.4", g_density = "shannon";
  double g_lo = -3.0, g_hi = 3.0;
  gamma->add_option("--d", g_d, "alphabet size");
  gamma->add_option("--phi", g_phi, "level-1 observable for Gamma");
  gamma->add_option("--mu", g_mu, "probability vector for entropy recovery");
  gamma->add_option("--density", g_density, "shannon | two-bump");
  gamma->add_option("--lo", g_lo, "coefficient lattice lower end");
  gamma->add_option("--hi", g_hi, "coefficient lattice upper end");
  gamma->add_option("--steps", g_steps, "coefficient lattice steps");
  gamma->add_option("--resolution", g_res, "coarse lattice resolution");

  // transport
  auto* transport = app.add_subcommand("transport", "W1 distances and contraction checks");
  std::size_t t_trials = 1000, t_d = 2, t_depth = 4, t_oracle = 20;
  double t_gamma = 0.3;
  transport->add_option("--trials", t_trials, "randomized trials per bound");
  transport->add_option("--d", t_d, "alphabet size");
  transport->add_option("--gamma", t_gamma, "metric parameter, 0 < gamma < 1/(d+1)");
  transport->add_option("--depth", t_depth, "measure depth");
  transport->add_option("--oracle-pairs", t_oracle, "random pairs compared against the LP oracle");

  // ifs
  auto* ifs = app.add_subcommand("ifs", "weighted Jacobian IFS attractor and invariant pressure");
  std::size_t i_N = 6, i_depth0 = 0;
  double i_gamma = 0.2, i_eps = 0.0;
  std::string i_p = "0.3,0.7", i_q = "0,-1", i_json;
  ifs->add_option("--gamma", i_gamma, "metric parameter on the two-letter shift");
  ifs->add_option("--p", i_p, "Bernoulli Jacobian parameters, comma separated");
  ifs->add_option("--q", i_q, "max-plus weights (<= 0, max 0), comma separated");
  ifs->add_option("--N", i_N, "word length");
  ifs->add_option("--nu0-depth", i_depth0, "depth of the uniform initial measure");
  ifs->add_option("--epsilon", i_eps, "merge tolerance (0: max(r^N, gamma^depth))");
  ifs->add_option("--json", i_json, "write the attractor sample as JSON");

  // mpifs
  auto* mpifs = app.add_subcommand("mpifs", "mpIFS operator triple and inverse problem");
  std::string m_h = "0,-1,-2";
  std::size_t m_systems = 100, m_points = 50, m_maps = 5;
  mpifs->add_option("--h-table", m_h, "density table for the inverse problem (<= 0, max 0)");
  mpifs->add_option("--systems", m_systems, "random systems for the duality check");
  mpifs->add_option("--points", m_points, "maximum number of points per random system");
  mpifs->add_option("--maps", m_maps, "maximum number of maps per random system");

  // ldp
  auto* ldp = app.add_subcommand("ldp", "max-plus partition function and deviation bound (Bernoulli example)");
  double l_p = 0.5, l_b = 0.5, l_level = 0.99;
  std::string l_t = "0.2,0.6931471805599453", l_n = "1,5,10,20";
  std::size_t l_samples = 100000, l_mc_max = 50;
  ldp->add_option("--p", l_p, "mass of the symbol where f = 0");
  ldp->add_option("--b", l_b, "threshold, 0 < b < 1");
  ldp->add_option("--t", l_t, "values t >= 0 for c_n(-t), comma separated");
  ldp->add_option("--n", l_n, "orbit lengths, comma separated");
  ldp->add_option("--samples", l_samples, "Monte Carlo orbits per estimate");
  ldp->add_option("--mc-max-n", l_mc_max, "skip Monte Carlo for longer orbits");
  ldp->add_option("--level", l_level, "bootstrap confidence level");

  // verify
  auto* verify = app.add_subcommand("verify", "run the golden acceptance battery");
  std::string v_criteria;
  verify->add_option("--criteria", v_criteria, "subset of criteria, comma separated (default all)");

  // splice config-file arguments right after the subcommand so flags win
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    for (std::size_t i = 0; i + 1 < args.size(); ++i) {
      if (args[i] == "--config") config_path = args[i + 1];
      if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
    }
    if (!config_path.empty()) {
      const auto extra = read_config_file(config_path);
      std::size_t at = 0;
      while (at < args.size() && !app.get_subcommand_no_throw(args[at])) ++at;
      mpt::require(at < args.size(), "config file given without a subcommand");
      args.insert(args.begin() + static_cast<std::ptrdiff_t>(at + 1), extra.begin(), extra.end());
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitPrecondition;
  }
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitPrecondition;
  }

  CLI::App* sub = app.get_subcommands().front();
  const mpt::ConfigMap config = resolved_config(app, *sub);
  std::cout.precision(17);

  try {
    if (sub == pressure) {
      mpt::Level1Observable g{parse_list(p_g, "g")};
      mpt::require(g.coefficients.size() == p_d, "--g must have d coefficients");
      mpt::SimplexGrid grid;
      grid.dimension = p_d;
      grid.resolution = p_res;
      grid.validate();
      const auto eq = mpt::level2_pressure(density_by_name(p_density, p_d), mpt::inclusion_j(g), grid);
      std::cout << "value " << format_double(eq.value) << '\n';
      for (const auto& p : eq.equilibria) std::cout << "equilibrium " << join(p.masses()) << '\n';
      if (p_density == "shannon") {
        std::cout << "softmax " << join(mpt::gibbs_solution(g).masses()) << '\n';
        std::cout << "log_sum_exp " << format_double(mpt::log_sum_exp(g.coefficients)) << '\n';
      }
      output.write([&](std::ostream& os) {
        std::vector<std::string> cols{"index", "value"};
        for (std::size_t i = 1; i <= p_d; ++i) cols.push_back("p_" + std::to_string(i));
        mpt::CsvWriter csv(os, config, cols);
        for (std::size_t k = 0; k < eq.equilibria.size(); ++k) {
          std::vector<std::string> row{std::to_string(k), format_double(eq.value)};
          for (double x : eq.equilibria[k].masses()) row.push_back(format_double(x));
          csv.row(row);
        }
      });
      return 0;
    }

    if (sub == gamma) {
      mpt::Level1Observable phi{parse_list(g_phi, "phi")};
      const mpt::ProbVector mu(parse_list(g_mu, "mu"));
      mpt::require(phi.coefficients.size() == g_d && mu.size() == g_d, "--phi and --mu must have d entries");
      mpt::SimplexGrid grid;
      grid.dimension = g_d;
      grid.resolution = g_res;
      grid.validate();
      const auto h = density_by_name(g_density, g_d);
      const double value = mpt::convex_pressure_gamma(h, phi, grid);
      const auto rec = mpt::entropy_recovery(h, mu, mpt::coefficient_grid_family(g_d, g_lo, g_hi, g_steps), grid);
      std::cout << "gamma " << format_double(value) << '\n';
      std::cout << "recovered_entropy " << format_double(rec.value) << '\n';
      std::cout << "density_at_mu " << format_double(h(mu).extended()) << '\n';
      double env_value = std::nan("");
      if (g_d == 2) {
        const mpt::ConcaveEnvelope1D env(h, 10001);
        env_value = mpt::convex_pressure_gamma(env.as_density(), phi, grid);
        std::cout << "envelope_gamma " << format_double(env_value) << '\n';
      }
      output.write([&](std::ostream& os) {
        mpt::CsvWriter csv(os, config, {"gamma", "recovered_entropy", "density_at_mu", "envelope_gamma"});
        csv.row({format_double(value), format_double(rec.value), format_double(h(mu).extended()),
                 format_double(env_value)});
      });
      return 0;
    }

    if (sub == transport) {
      const mpt::ShiftSpace space(t_d, t_gamma);
      const auto trials = mpt::run_contraction_trials(space, t_depth, t_trials, seed);
      double oracle_gap = 0.0;
      const std::size_t oracle_depth = std::min<std::size_t>(t_depth, t_d == 2 ? 6 : 4);
      for (std::size_t i = 0; i < t_oracle; ++i) {
        mpt::Rng rng(mpt::derive_seed(seed ^ 0x5bd1e995ULL, i));
        const auto mu = mpt::CylinderMeasure::random(space, oracle_depth, rng);
        const auto nu = mpt::CylinderMeasure::random(space, oracle_depth, rng);
        oracle_gap = std::max(oracle_gap, std::abs(mpt::w1_tree(mu, nu) - mpt::w1_lp_oracle(mu, nu).value));
      }
      std::cout << "max_ratio " << format_double(trials.max_ratio) << " bound " << format_double(trials.rate) << '\n';
      std::cout << "contraction_violations " << trials.contraction_violations << '\n';
      std::cout << "perturbation_violations " << trials.perturbation_violations << " worst_slack "
                << format_double(trials.worst_perturbation_slack) << '\n';
      std::cout << "joint_violations " << trials.joint_violations << " worst_slack "
                << format_double(trials.worst_joint_slack) << '\n';
      std::cout << "oracle_max_difference " << format_double(oracle_gap) << '\n';
      output.write([&](std::ostream& os) {
        mpt::CsvWriter csv(os, config, {"metric", "value"});
        csv.row({"max_ratio", format_double(trials.max_ratio)});
        csv.row({"rate", format_double(trials.rate)});
        csv.row({"violations", std::to_string(trials.violations())});
        csv.row({"oracle_max_difference", format_double(oracle_gap)});
      });
      const bool ok = trials.violations() == 0 && trials.max_ratio <= trials.rate + 1e-10 && oracle_gap <= 1e-9;
      return ok ? 0 : kExitAssertion;
    }

    if (sub == ifs) {
      const mpt::ShiftSpace space(2, i_gamma);
      const auto ps = parse_list(i_p, "p");
      const auto qs = parse_list(i_q, "q");
      std::vector<mpt::Jacobian> js;
      for (double p : ps) js.push_back(mpt::make_bernoulli_jacobian(p, space));
      const mpt::WeightedJacobianFamily fam(space, js, qs);
      const auto nu0 = mpt::CylinderMeasure::uniform(space, i_depth0);
      mpt::AttractorOptions opts;
      if (i_eps > 0.0) opts.epsilon = i_eps;
      const auto sample = mpt::attractor_build(fam, i_N, nu0, opts);
      const mpt::MeasureObservable first = [](const mpt::CylinderMeasure& m) { return m.coarsen(1)[0]; };
      const auto ell0 = mpt::invariant_pressure_solve(fam, [](const mpt::CylinderMeasure&) { return 0.0; }, 0.0, i_N, nu0);
      const auto ell = mpt::invariant_pressure_solve(fam, first, 1.0, i_N, nu0);
      std::cout << "leaves " << sample.leaves.size() << " clusters " << sample.clusters.size() << '\n';
      std::cout << "epsilon " << format_double(sample.epsilon) << " rate " << format_double(sample.rate)
                << " measure_depth " << sample.measure_depth << '\n';
      std::cout << "pressure_of_zero " << format_double(ell0.value) << '\n';
      std::cout << "pressure_of_first_cylinder " << format_double(ell.value) << " error_bound "
                << format_double(ell.error_bound) << " fixed_point_residual " << format_double(ell.fixed_point_residual)
                << '\n';
      double diameter = 0.0;
      for (const auto& c : sample.clusters) diameter = std::max(diameter, c.diameter);
      std::cout << "max_cluster_diameter " << format_double(diameter) << '\n';
      const std::string json_path = !i_json.empty() ? i_json : output.path;
      if (!json_path.empty()) {
        nlohmann::json j = mpt::to_json(sample);
        j["config"] = config;
        std::ofstream os(json_path);
        mpt::require(static_cast<bool>(os), "cannot write output file " + json_path);
        os << j.dump(1) << '\n';
      }
      const bool ok = ell0.value == 0.0 && ell.fixed_point_residual <= ell.error_bound + 1e-12;
      return ok ? 0 : kExitAssertion;
    }

    if (sub == mpifs) {
      const auto h = parse_list(m_h, "h-table");
      const auto sol = mpt::inverse_problem_solve(h);
      mpt::PointDensity lambda;
      for (double x : h) lambda.push_back(mpt::MaxPlusValue(x));
      const auto inv = mpt::mpifs_invariance_check(lambda, sol.system, {});
      std::cout << "inverse_fixed_point_residual " << format_double(sol.fixed_point_residual) << '\n';
      std::cout << "pointwise_normalization " << format_double(sol.pointwise_normalization)
                << " family_normalization " << format_double(sol.family_normalization) << '\n';
      std::cout << "h_invariant " << (inv.all_hold() ? "yes" : "no") << '\n';
      double duality = 0.0;
      std::size_t disagreements = 0;
      for (std::size_t s = 0; s < m_systems; ++s) {
        mpt::Rng rng(mpt::derive_seed(seed, s));
        const std::size_t n = 1 + rng.index(m_points);
        const auto sys = mpt::random_mpifs(n, 1 + rng.index(m_maps), rng);
        mpt::PointDensity lam(n);
        for (auto& v : lam) v = mpt::MaxPlusValue(-rng.uniform(0.0, 4.0));
        mpt::PointTable f(n);
        for (auto& x : f) x = rng.uniform(-3.0, 3.0);
        duality = std::max(duality, mpt::residual(mpt::markov_apply(lam, f, sys),
                                                  mpt::pressure_of(mpt::mpifs_transfer(lam, sys), f)));
        if (!mpt::mpifs_invariance_check(lam, sys, {f}).agree()) ++disagreements;
        if (!mpt::mpifs_invariance_check(mpt::mpifs_limit_density(sys), sys, {f}).all_hold()) ++disagreements;
      }
      std::cout << "random_systems " << m_systems << " duality_residual " << format_double(duality)
                << " invariance_disagreements " << disagreements << '\n';
      output.write([&](std::ostream& os) {
        mpt::CsvWriter csv(os, config, {"metric", "value"});
        csv.row({"inverse_fixed_point_residual", format_double(sol.fixed_point_residual)});
        csv.row({"pointwise_normalization", format_double(sol.pointwise_normalization)});
        csv.row({"family_normalization", format_double(sol.family_normalization)});
        csv.row({"duality_residual", format_double(duality)});
        csv.row({"invariance_disagreements", std::to_string(disagreements)});
      });
      const bool ok = sol.fixed_point_residual == 0.0 && inv.all_hold() && duality <= 1e-12 && disagreements == 0;
      return ok ? 0 : kExitAssertion;
    }

    if (sub == ldp) {
      mpt::require(l_p > 0.0 && l_p < 1.0, "--p must satisfy 0 < p < 1, got " + format_double(l_p));
      mpt::require(l_b > 0.0 && l_b < 1.0, "--b must satisfy 0 < b < sup f = 1, got " + format_double(l_b));
      const auto ts = parse_list(l_t, "t");
      for (double t : ts) mpt::require(t >= 0.0, "--t values must be >= 0");
      const auto ns = parse_counts(l_n, "n");
      const auto est = mpt::empirical_rate(l_p, l_b, ns);
      std::cout << "# symbol 1 has mass p and f = 0; symbol 0 has mass 1-p and f = 1\n";
      std::cout << "bound " << format_double(est.bound.bound) << " t_star " << format_double(est.bound.t_star)
                << " rate " << format_double(est.limsup) << " gap " << format_double(est.bound.bound - est.limsup)
                << '\n';
      const auto ex = mpt::BernoulliExample::make(l_p);
      const mpt::OrbitSampler sampler(ex.measure, seed);
      mpt::MonteCarloOptions mc;
      mc.samples = l_samples;
      mc.level = l_level;
      std::ostringstream csv_text;
      mpt::CsvWriter csv(csv_text, config, {"n", "t_or_b", "exact_value", "mc_value", "ci_low", "ci_high", "seed"});
      for (std::size_t n : ns) {
        for (double t : ts) {
          const double exact = mpt::partition_function_exact(l_p, -t, n).c;
          mpt::MonteCarloEstimate e{std::nan(""), std::nan(""), std::nan(""), 0};
          if (n <= l_mc_max) e = mpt::partition_function_mc(sampler, ex.f, -t, n, mc);
          std::cout << "c_n n " << n << " t " << format_double(t) << " exact " << format_double(exact) << " mc "
                    << format_double(e.value) << " ci " << format_double(e.ci_low) << ' ' << format_double(e.ci_high)
                    << '\n';
          csv.row({std::to_string(n), format_double(t), format_double(exact), format_double(e.value),
                   format_double(e.ci_low), format_double(e.ci_high), std::to_string(seed)});
        }
      }
      for (std::size_t i = 0; i < est.n.size(); ++i) {
        std::cout << "rate n " << est.n[i] << " b " << format_double(l_b) << " value " << format_double(est.rates[i])
                  << '\n';
      }
      output.write([&](std::ostream& os) { os << csv_text.str(); });
      return est.limsup < est.bound.bound ? 0 : kExitAssertion;
    }

    if (sub == verify) {
      std::vector<int> ids;
      if (!v_criteria.empty()) {
        for (std::size_t id : parse_counts(v_criteria, "criteria")) ids.push_back(static_cast<int>(id));
      }
      bool all = true;
      for (const auto& r : mpt::run_battery(ids)) {
        std::cout << mpt::format_result(r) << std::endl;
        all = all && r.pass;
      }
      std::cout << (all ? "all golden checks pass" : "golden checks FAILED") << '\n';
      return all ? 0 : kExitAssertion;
    }
  } catch (const mpt::PreconditionError& e) {
    std::cerr << "precondition violated: " << e.what() << '\n';
    return kExitPrecondition;
  }
  return 0;
}
