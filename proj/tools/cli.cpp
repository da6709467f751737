#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "resalloc/bench.hpp"
#include "resalloc/errors.hpp"
#include "resalloc/generate.hpp"
#include "resalloc/io.hpp"
#include "resalloc/oracle.hpp"
#include "resalloc/solver.hpp"

namespace resalloc::cli {
namespace {

namespace fs = std::filesystem;

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::kParseError:
    case ErrorCode::kIoError:
      return kIoFailure;
    default:
      return kValidationFailure;
  }
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::kIoError, "cannot open " + path.string() + " for writing");
  return f;
}

void write_trace(const fs::path& path, const std::vector<IterationRecord>& trace, std::size_t m) {
  auto f = open_output(path);
  f << "iter,dual_value,primal_utility,gap";
  for (std::size_t j = 1; j <= m; ++j) f << ",p_" << j;
  for (std::size_t j = 1; j <= m; ++j) f << ",r_" << j;
  f << '\n';
  for (const auto& rec : trace) {
    f << rec.iter << ',' << format_real(rec.dual_value) << ',' << format_real(rec.primal_utility)
      << ',' << format_real(rec.gap);
    for (double p : rec.prices) f << ',' << format_real(p);
    for (double r : rec.usage) f << ',' << format_real(r);
    f << '\n';
  }
  if (!f) throw Error(ErrorCode::kIoError, "failed writing " + path.string());
}

struct GenerateArgs {
  std::string family = "medium";
  std::size_t jobs = 0;
  std::size_t resources = 4;
  std::uint64_t seed = 0;
  std::string utility = "log";
  double alpha = 2.0;
  double rho = 0.5;
  std::string out;
};

int cmd_generate(const GenerateArgs& args, std::ostream& out) {
  GeneratorSpec spec;
  auto family = parse_generator_family(args.family);
  if (!family) throw Error(ErrorCode::kUnsupportedFamily, "unknown generator family " + args.family);
  auto utility = parse_family(args.utility);
  if (!utility) throw Error(ErrorCode::kInvalidUtility, "unknown utility family " + args.utility);
  spec.family = *family;
  spec.jobs = args.jobs;
  if (spec.jobs == 0) spec.jobs = *family == GeneratorFamily::kLarge ? 50'000'000 : 1'000'000;
  spec.resources = args.resources;
  spec.seed = args.seed;
  spec.utility = *utility;
  spec.alpha = args.alpha;
  spec.rho = args.rho;
  Problem problem = generate_problem(spec);
  io::save_problem(args.out, problem);
  out << "wrote " << args.out << " (n=" << problem.num_jobs() << ", m=" << problem.num_resources()
      << ")\n";
  return kConverged;
}

struct SolveArgs {
  std::string problem;
  double tol = 1e-3;
  int max_iters = 300;
  std::string updates = "lbfgs";
  unsigned threads = 1;
  std::string trace;
  std::string out_allocation;
  std::string out_prices;
  bool verbose = false;
};

int cmd_solve(const SolveArgs& args, std::ostream& out) {
  Problem problem = io::load_problem(args.problem);
  const std::size_t n = problem.num_jobs();

  SolveOptions options;
  options.tolerance = args.tol * static_cast<double>(std::max<std::size_t>(n, 1));
  options.max_iters = args.max_iters;
  options.update_rule = args.updates == "subgradient" ? UpdateRule::kSubgradient : UpdateRule::kLbfgs;
  options.kernel.threads = args.threads;
  if (args.verbose) {
    options.on_iteration = [&](const IterationRecord& rec) {
      out << format_progress(rec, n) << '\n' << std::flush;
    };
  }

  SolveResult result = solve(problem, options);

  if (!args.out_allocation.empty()) io::write_matrix(args.out_allocation, result.x_feasible);
  if (!args.out_prices.empty()) io::write_vector(args.out_prices, result.prices);
  if (!args.trace.empty()) write_trace(args.trace, result.trace, problem.num_resources());

  const double scale = n > 0 ? static_cast<double>(n) : 1.0;
  out << (result.converged ? "converged" : "iteration limit reached") << " after "
      << result.trace.size() << " iterations: utility=" << format_real(result.primal_utility / scale)
      << " dual_value=" << format_real(result.dual_value / scale)
      << " gap=" << format_real(result.gap() / scale) << " two_resources="
      << result.stats.frac_two_resources << " positive_slack=" << result.stats.frac_positive_slack
      << '\n';
  return result.converged ? kConverged : kIterationLimit;
}

struct VerifyArgs {
  std::string problem;
  std::string allocation;
  std::string prices;
  double tol = 1e-3;
};

int cmd_verify(const VerifyArgs& args, std::ostream& out) {
  Problem problem = io::load_problem(args.problem);
  Allocation x = io::read_matrix(args.allocation, problem.num_jobs(), problem.num_resources());
  std::vector<double> prices = io::read_vector(args.prices, problem.num_resources());
  const double tol = args.tol * static_cast<double>(std::max<std::size_t>(problem.num_jobs(), 1));
  oracle::KktReport report = oracle::check_kkt(problem, x, prices, tol);
  out << "primal_feasibility=" << format_real(report.primal_feasibility)
      << " (tolerance " << format_real(report.feasibility_tolerance) << ")\n"
      << "stationarity=" << format_real(report.stationarity) << " (tolerance "
      << format_real(report.stationarity_tolerance) << ")\n"
      << "complementary_slackness=" << format_real(report.complementary_slackness)
      << " (tolerance " << format_real(report.slackness_tolerance) << ")\n"
      << (report.passed ? "KKT passed" : "KKT FAILED") << '\n';
  return report.passed ? kConverged : kKktFailed;
}

struct BenchArgs {
  std::string sweep = "jobs";
  std::vector<std::size_t> sizes;
  std::size_t fixed = 0;
  int repetitions = 5;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string envelope = "hull";
  std::size_t fit_min = 0;
  std::size_t fit_max = std::numeric_limits<std::size_t>::max();
  std::string csv;
};

int cmd_bench(const BenchArgs& args, std::ostream& out) {
  SweepConfig config;
  config.axis = args.sweep == "resources" ? SweepAxis::kResources : SweepAxis::kJobs;
  const bool jobs = config.axis == SweepAxis::kJobs;
  config.sizes = args.sizes;
  if (config.sizes.empty()) {
    config.sizes = jobs ? std::vector<std::size_t>{10'000, 30'000, 100'000, 300'000, 1'000'000}
                        : std::vector<std::size_t>{4, 8, 16, 32, 64};
  }
  config.fixed = args.fixed != 0 ? args.fixed : (jobs ? 4 : 100'000);
  config.repetitions = args.repetitions;
  config.seed = args.seed;
  config.threads = args.threads;
  config.envelope = args.envelope == "pairwise" ? EnvelopeMethod::kPairwise : EnvelopeMethod::kHull;

  std::vector<SweepPoint> points = run_sweep(config);
  if (!args.csv.empty()) {
    auto f = open_output(args.csv);
    f << "jobs,resources,repetition,seconds\n";
    for (const auto& pt : points) {
      for (std::size_t r = 0; r < pt.seconds.size(); ++r) {
        f << pt.jobs << ',' << pt.resources << ',' << r << ',' << format_real(pt.seconds[r]) << '\n';
      }
    }
  }
  for (const auto& pt : points) {
    out << (jobs ? "n=" : "m=") << (jobs ? pt.jobs : pt.resources)
        << " mean_seconds=" << format_real(pt.mean_seconds()) << '\n';
  }
  PowerLawFit fit = fit_sweep(points, config.axis, args.fit_min, args.fit_max);
  out << "fit: log(s) ~ a + b log(" << (jobs ? "n" : "m") << "), b=" << fit.exponent
      << " prefactor=" << fit.prefactor() << '\n';
  return kConverged;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fungible resource allocation by dual price discovery", "resalloc"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Write a synthetic problem instance");
  generate->add_option("--family", gen.family, "medium, large or scaling")
      ->check(CLI::IsMember({"medium", "large", "scaling"}));
  generate->add_option("--jobs,-n", gen.jobs, "Number of jobs (family default when omitted)");
  generate->add_option("--resources,-m", gen.resources, "Number of resources (scaling family)");
  generate->add_option("--seed", gen.seed, "Generator seed")->required();
  generate->add_option("--utility", gen.utility, "Utility family")
      ->check(CLI::IsMember({"linear", "log", "alpha-fair", "power", "target-priority"}));
  generate->add_option("--alpha", gen.alpha, "Alpha-fair parameter");
  generate->add_option("--rho", gen.rho, "Power-utility exponent");
  generate->add_option("--out", gen.out, "Manifest path")->required();

  SolveArgs sol;
  auto* solve_cmd = app.add_subcommand("solve", "Find prices and a feasible allocation");
  solve_cmd->add_option("--problem", sol.problem, "Problem manifest")->required();
  solve_cmd->add_option("--tol", sol.tol, "Duality-gap tolerance per job")
      ->check(CLI::PositiveNumber);
  solve_cmd->add_option("--max-iters", sol.max_iters, "Iteration limit")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--updates", sol.updates, "Price update rule")
      ->check(CLI::IsMember({"lbfgs", "subgradient"}));
  solve_cmd->add_option("--threads", sol.threads, "Worker threads (0 = all cores)");
  solve_cmd->add_option("--trace", sol.trace, "Per-iteration trace CSV");
  solve_cmd->add_option("--out-allocation", sol.out_allocation, "Feasible allocation (binary f64)");
  solve_cmd->add_option("--out-prices", sol.out_prices, "Prices (CSV, path ending in .csv)")
      ->check(CLI::Validator(
          [](std::string& path) {
            return fs::path(path).extension() == ".csv" ? std::string() : "prices are written as .csv";
          },
          "PATH.csv"));
  solve_cmd->add_flag("--verbose,-v", sol.verbose, "Print one progress line per iteration");

  VerifyArgs ver;
  auto* verify = app.add_subcommand("verify", "Check KKT conditions of an allocation and prices");
  verify->add_option("--problem", ver.problem, "Problem manifest")->required();
  verify->add_option("--allocation", ver.allocation, "Allocation matrix")->required();
  verify->add_option("--prices", ver.prices, "Price vector")->required();
  verify->add_option("--tol", ver.tol, "Per-job tolerance")->check(CLI::PositiveNumber);

  BenchArgs ben;
  auto* bench = app.add_subcommand("bench", "Time dual evaluation over a size sweep");
  bench->add_option("--sweep", ben.sweep, "jobs or resources")
      ->check(CLI::IsMember({"jobs", "resources"}));
  bench->add_option("--sizes", ben.sizes, "Swept sizes")->delimiter(',');
  bench->add_option("--fixed", ben.fixed, "Size of the other dimension");
  bench->add_option("--repetitions", ben.repetitions, "Timed runs per size")
      ->check(CLI::PositiveNumber);
  bench->add_option("--seed", ben.seed, "Generator seed");
  bench->add_option("--threads", ben.threads, "Worker threads (0 = all cores)");
  bench->add_option("--envelope", ben.envelope, "hull or pairwise")
      ->check(CLI::IsMember({"hull", "pairwise"}));
  bench->add_option("--fit-min", ben.fit_min, "Smallest size included in the fit");
  bench->add_option("--fit-max", ben.fit_max, "Largest size included in the fit");
  bench->add_option("--csv", ben.csv, "Raw timings CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kValidationFailure;
  }

  try {
    if (*generate) return cmd_generate(gen, out);
    if (*solve_cmd) return cmd_solve(sol, out);
    if (*verify) return cmd_verify(ver, out);
    return cmd_bench(ben, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kIoFailure;
  }
}

}  // namespace resalloc::cli
