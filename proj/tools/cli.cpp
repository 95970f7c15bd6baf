#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "qopp/errors.hpp"
#include "qopp/generators.hpp"
#include "qopp/oracle.hpp"
#include "qopp/problem_io.hpp"
#include "qopp/retime.hpp"

namespace qopp::cli {
namespace {

struct SolveOptions {
  std::string input;
  std::string output;
  std::string objective = "auto";
  bool verify = false;
  bool emit_diagnostics = false;
  double dt = 0.01;
  std::string csv;
  std::string path;
};

struct GenOptions {
  std::string preset;
  std::size_t N = 0;
  std::string output;
  std::string path_out;
};

struct BenchOptions {
  std::size_t min_n = 100;
  std::size_t max_n = 100000;
  double growth = 10.0;
  std::size_t reps = 5;
  std::string objective = "topp";
  std::string output;
};

void emit(const std::string& target, const std::string& text, std::ostream& out) {
  if (target.empty() || target == "-") {
    out << text;
  } else {
    io::write_text(target, text);
  }
}

io::Verification verify(const DiscretizedProblem& problem, const SolutionProfile& profile) {
  const SolutionProfile ref = profile.objective == Objective::kQuadratic
                                  ? oracle::qopp_oracle(problem)
                                  : oracle::topp_oracle(problem);
  io::Verification v;
  for (std::size_t k = 0; k < ref.x.size(); ++k) {
    v.max_x_deviation = std::max(v.max_x_deviation, std::abs(ref.x[k] - profile.x[k]));
  }
  if (profile.objective_value && ref.objective_value) {
    v.objective_gap = std::abs(*profile.objective_value - *ref.objective_value);
  }
  return v;
}

int cmd_solve(const SolveOptions& opt, std::ostream& out, std::ostream& err) {
  const DiscretizedProblem problem = io::read_problem(opt.input);
  const Objective objective = objective_from_string(opt.objective);
  if (opt.verify && problem.horizon() > oracle::kMaxQoppOracleSteps) {
    err << "error: --verify is limited to N <= " << oracle::kMaxQoppOracleSteps << " (N = "
        << problem.horizon() << ")\n";
    return kInputError;
  }

  io::SolutionDocument doc;
  try {
    doc.profile = solve(problem, objective);
  } catch (const Infeasible& e) {
    emit(opt.output, io::dump_infeasible(e), out);
    err << "infeasible: " << e.what() << "\n";
    return kInfeasible;
  }
  doc.include_reach = opt.emit_diagnostics;
  try {
    doc.timing = compute_timing(doc.profile, problem.delta_s);
  } catch (const Untraversable& e) {
    doc.untraversable_interval = e.interval();
  }
  if (opt.verify) doc.verification = verify(problem, doc.profile);

  if (!opt.csv.empty()) {
    if (doc.untraversable_interval) {
      err << "error: cannot sample a trajectory; interval " << *doc.untraversable_interval
          << " is never left\n";
      return kInputError;
    }
    const TimedTrajectory traj =
        opt.path.empty() ? sample_parameterization(problem.grid(), doc.profile, opt.dt)
                         : sample_trajectory(io::read_path(opt.path), doc.profile, opt.dt);
    std::ofstream os(opt.csv);
    if (!os) throw std::runtime_error("cannot open " + opt.csv);
    write_trajectory_csv(os, traj);
  }
  emit(opt.output, io::dump_solution(doc), out);
  return kOk;
}

int cmd_gen(const GenOptions& opt, std::ostream& out) {
  DiscretizedProblem problem;
  if (opt.preset == "simple" || opt.preset == "simple-quadratic") {
    problem = gen::simple_benchmark(opt.N, opt.preset == "simple-quadratic");
  } else if (opt.preset == "kinematic") {
    const PathSamples path = gen::circle_path(opt.N);
    problem = gen::kinematic_limits(path, Eigen::VectorXd::Constant(2, 1.0),
                                    Eigen::VectorXd::Constant(2, 2.0));
    if (!opt.path_out.empty()) io::write_text(opt.path_out, io::dump_path(path));
  } else {
    problem = gen::cable_robot_problem(gen::star_cable_robot(opt.N));
  }
  emit(opt.output, io::dump_problem(problem), out);
  return kOk;
}

int cmd_bench(const BenchOptions& opt, std::ostream& out, std::ostream& err) {
  if (opt.min_n < 2 || opt.max_n < opt.min_n || opt.reps < 1 || !(opt.growth > 1.0)) {
    err << "error: need 2 <= min <= max, growth > 1 and reps >= 1\n";
    return kInputError;
  }
  const Objective objective = objective_from_string(opt.objective);
  std::vector<BenchRecord> records;
  for (std::size_t n : bench_sizes(opt.min_n, opt.max_n, opt.growth)) {
    records.push_back(bench_point(n, objective, opt.reps));
  }
  std::ostringstream csv;
  write_bench_csv(csv, records);
  emit(opt.output, csv.str(), out);
  return kOk;
}

}  // namespace

std::vector<std::size_t> bench_sizes(std::size_t min_n, std::size_t max_n, double growth) {
  std::vector<std::size_t> sizes;
  for (double n = static_cast<double>(min_n); n <= static_cast<double>(max_n) * (1 + 1e-12);
       n *= growth) {
    const auto k = static_cast<std::size_t>(std::llround(n));
    if (sizes.empty() || k > sizes.back()) sizes.push_back(std::min(k, max_n));
  }
  return sizes;
}

BenchRecord bench_point(std::size_t N, Objective objective, std::size_t repetitions) {
  const bool quadratic = objective == Objective::kQuadratic;
  const DiscretizedProblem problem = gen::simple_benchmark(N, quadratic);
  const Objective resolved = quadratic ? Objective::kQuadratic : Objective::kTopp;

  std::vector<double> times;
  SolutionProfile profile;
  for (std::size_t r = 0; r < std::max<std::size_t>(repetitions, 1); ++r) {
    const auto start = std::chrono::steady_clock::now();
    profile = solve(problem, resolved);
    const auto stop = std::chrono::steady_clock::now();
    times.push_back(std::chrono::duration<double, std::nano>(stop - start).count());
  }
  const Residuals res = residuals(problem, profile.x, profile.u);
  if (res.max_row_violation > 1e-9 || res.max_dynamics_residual > 1e-12) {
    throw std::runtime_error("bench: residual check failed at N = " + std::to_string(N));
  }

  std::sort(times.begin(), times.end());
  const std::size_t m = times.size();
  BenchRecord rec;
  rec.N = N;
  rec.time_ns = m % 2 ? times[m / 2] : 0.5 * (times[m / 2 - 1] + times[m / 2]);
  rec.objective = resolved;
  const auto& seg = profile.diagnostics.segment_counts;
  if (!seg.empty()) {
    rec.max_segments = *std::max_element(seg.begin(), seg.end());
    rec.mean_segments = static_cast<double>(std::accumulate(seg.begin(), seg.end(), std::size_t{0})) /
                        static_cast<double>(seg.size());
  }
  return rec;
}

void write_bench_csv(std::ostream& os, const std::vector<BenchRecord>& records) {
  os << "N,time_ns,max_segments,mean_segments,objective\n";
  for (const BenchRecord& r : records) {
    os << r.N << ',' << std::llround(r.time_ns) << ',' << r.max_segments << ',' << r.mean_segments
       << ',' << to_string(r.objective) << '\n';
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Path parameterization by variable elimination", "qopp"};
  app.require_subcommand(1);

  SolveOptions solve_opt;
  CLI::App* solve_cmd = app.add_subcommand("solve", "Solve a problem file");
  solve_cmd->add_option("-i,--input", solve_opt.input, "Problem JSON")->required();
  solve_cmd->add_option("-o,--output", solve_opt.output, "Solution JSON (default stdout)");
  solve_cmd->add_option("--objective", solve_opt.objective, "auto, topp or quadratic")
      ->check(CLI::IsMember({"auto", "topp", "quadratic"}));
  solve_cmd->add_flag("--verify", solve_opt.verify, "Compare against the dense oracle (N <= 30)");
  solve_cmd->add_flag("--emit-diagnostics", solve_opt.emit_diagnostics, "Include reach intervals");
  solve_cmd->add_option("--dt", solve_opt.dt, "Trajectory sampling period [s]")
      ->check(CLI::PositiveNumber);
  solve_cmd->add_option("--csv", solve_opt.csv, "Write the sampled trajectory here");
  solve_cmd->add_option("--path", solve_opt.path, "Path samples JSON for joint-space export");

  GenOptions gen_opt;
  CLI::App* gen_cmd = app.add_subcommand("gen", "Write a built-in problem");
  gen_cmd->add_option("preset", gen_opt.preset, "simple, simple-quadratic, kinematic or cable")
      ->required()
      ->check(CLI::IsMember({"simple", "simple-quadratic", "kinematic", "cable"}));
  gen_cmd->add_option("N", gen_opt.N, "Number of intervals")->required()->check(CLI::PositiveNumber);
  gen_cmd->add_option("-o,--output", gen_opt.output, "Problem JSON (default stdout)");
  gen_cmd->add_option("--path-out", gen_opt.path_out, "Also write the path samples (kinematic)");

  BenchOptions bench_opt;
  CLI::App* bench_cmd = app.add_subcommand("bench", "Time solve() over a size sweep");
  bench_cmd->add_option("--min", bench_opt.min_n, "Smallest N")->capture_default_str();
  bench_cmd->add_option("--max", bench_opt.max_n, "Largest N")->capture_default_str();
  bench_cmd->add_option("--growth", bench_opt.growth, "Ratio between sizes")->capture_default_str();
  bench_cmd->add_option("--reps", bench_opt.reps, "Repetitions per size (median)")
      ->capture_default_str();
  bench_cmd->add_option("--objective", bench_opt.objective, "topp or quadratic")
      ->check(CLI::IsMember({"topp", "quadratic"}))
      ->capture_default_str();
  bench_cmd->add_option("-o,--output", bench_opt.output, "CSV (default stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kInputError;
  }

  try {
    if (*solve_cmd) return cmd_solve(solve_opt, out, err);
    if (*gen_cmd) return cmd_gen(gen_opt, out);
    return cmd_bench(bench_opt, out, err);
  } catch (const InvalidProblem& e) {
    err << "error: " << e.what() << "\n";
    for (const std::string& d : e.diagnostics()) err << "  " << d << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
}

}  // namespace qopp::cli
