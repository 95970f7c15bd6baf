#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "qopp/elimination.hpp"
#include "qopp/errors.hpp"
#include "qopp/problem.hpp"
#include "qopp/retime.hpp"

/// JSON problem and solution documents.
///
/// Problem:
///   {"delta_s": 0.25 | [..],
///    "steps": [{"a": [..], "b": [..], "c": [..], "lo": [..], "hi": [..]}, ..],
///    "boundary": {"x0": [lo, hi], "xN": [lo, hi]},
///    "costs": [{"Q", "R", "N", "x_des", "u_des", "lin_x"?, "lin_u"?, "const"?}, ..],
///    "x_floor": 0}
/// JSON has no infinities: null stands for -inf as a lower bound and +inf as an
/// upper bound. "boundary", "costs" and "x_floor" are optional; a missing
/// boundary means rest to rest. Unknown fields are rejected.
namespace qopp::io {

/// Throws ParseError with the JSON path of the first offending value.
DiscretizedProblem parse_problem(std::string_view text);
DiscretizedProblem read_problem(const std::filesystem::path& path);

std::string dump_problem(const DiscretizedProblem& problem);
void write_problem(const std::filesystem::path& path, const DiscretizedProblem& problem);

/// {"grid": [..], "q": [[..], ..], "dq_ds": [[..], ..], "d2q_ds2": [[..], ..]}.
/// The derivative arrays are optional; missing ones are filled with zeros
/// (trajectory export only needs q).
PathSamples parse_path(std::string_view text);
PathSamples read_path(const std::filesystem::path& path);
std::string dump_path(const PathSamples& path);

struct Verification {
  double max_x_deviation = 0.0;
  std::optional<double> objective_gap;
};

struct SolutionDocument {
  SolutionProfile profile;
  std::optional<TimingResult> timing;  ///< absent when the profile is untraversable
  std::optional<std::size_t> untraversable_interval;
  bool include_reach = false;
  std::optional<Verification> verification;
};

/// {"status": "ok", "objective", "x", "u", "t", "duration",
///  "objective_value"?, "diagnostics": {...}}; t and duration are null when
/// the profile cannot be traversed in finite time.
std::string dump_solution(const SolutionDocument& doc);

/// {"status": "infeasible", "diagnostics": {"step", "rows", "message"}}.
std::string dump_infeasible(const Infeasible& error);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace qopp::io
