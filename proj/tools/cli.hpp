#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "qopp/elimination.hpp"

namespace qopp::cli {

/// Exit codes of every subcommand.
inline constexpr int kOk = 0;
inline constexpr int kInputError = 1;
inline constexpr int kInfeasible = 2;

/// Runs `qopp <args...>`; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct BenchRecord {
  std::size_t N = 0;
  double time_ns = 0.0;  ///< median wall-clock solve time
  std::size_t max_segments = 0;
  double mean_segments = 0.0;
  Objective objective = Objective::kTopp;
};

/// min, round(min*growth), ... up to max, strictly increasing.
std::vector<std::size_t> bench_sizes(std::size_t min_n, std::size_t max_n, double growth);

/// Times solve() on the benchmark problem of size N (quadratic costs for
/// kQuadratic). Throws if the returned profile fails the residual check.
BenchRecord bench_point(std::size_t N, Objective objective, std::size_t repetitions);

void write_bench_csv(std::ostream& os, const std::vector<BenchRecord>& records);

}  // namespace qopp::cli
