#include "qopp/problem_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json.hpp"

namespace qopp::io {

namespace {

using json = nlohmann::json;
using ordered = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ParseError(where + ": " + what);
}

void only_fields(const json& obj, const std::string& where,
                 std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(where, "expected an object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* name : allowed) known = known || item.key() == name;
    if (!known) fail(where, "unknown field \"" + item.key() + "\"");
  }
}

const json& required(const json& obj, const std::string& where, const char* name) {
  const auto it = obj.find(name);
  if (it == obj.end()) fail(where, std::string("missing field \"") + name + "\"");
  return *it;
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) fail(where, "expected a number");
  return v.get<double>();
}

// null maps to `if_null` (an infinity of the appropriate sign).
double bound(const json& v, const std::string& where, double if_null) {
  if (v.is_null()) return if_null;
  return number(v, where);
}

std::vector<double> numbers(const json& v, const std::string& where,
                            std::optional<double> if_null = std::nullopt) {
  if (!v.is_array()) fail(where, "expected an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string at = where + "[" + std::to_string(i) + "]";
    out.push_back(if_null ? bound(v[i], at, *if_null) : number(v[i], at));
  }
  return out;
}

Interval interval(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2) fail(where, "expected [lo, hi]");
  return {bound(v[0], where + "[0]", -kInf), bound(v[1], where + "[1]", kInf)};
}

ordered bound_out(double v) {
  if (std::isinf(v)) return nullptr;
  return v;
}

ordered interval_out(const Interval& i) { return ordered::array({bound_out(i.lo), bound_out(i.hi)}); }

template <class Range>
ordered array_out(const Range& r) {
  ordered a = ordered::array();
  for (double v : r) a.push_back(bound_out(v));
  return a;
}

json parse_document(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<Eigen::VectorXd> vectors(const json& v, const std::string& where) {
  if (!v.is_array()) fail(where, "expected an array of arrays");
  std::vector<Eigen::VectorXd> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::vector<double> row = numbers(v[i], where + "[" + std::to_string(i) + "]");
    out.push_back(Eigen::Map<const Eigen::VectorXd>(row.data(), static_cast<Eigen::Index>(row.size())));
  }
  return out;
}

ordered vectors_out(const std::vector<Eigen::VectorXd>& vs) {
  ordered a = ordered::array();
  for (const Eigen::VectorXd& v : vs) {
    a.push_back(array_out(std::vector<double>(v.data(), v.data() + v.size())));
  }
  return a;
}

}  // namespace

DiscretizedProblem parse_problem(std::string_view text) {
  const json doc = parse_document(text);
  only_fields(doc, "$", {"delta_s", "steps", "boundary", "costs", "x_floor"});

  DiscretizedProblem p;
  const json& steps = required(doc, "$", "steps");
  if (!steps.is_array()) fail("$.steps", "expected an array");
  p.steps.reserve(steps.size());
  for (std::size_t k = 0; k < steps.size(); ++k) {
    const std::string where = "$.steps[" + std::to_string(k) + "]";
    const json& s = steps[k];
    only_fields(s, where, {"a", "b", "c", "lo", "hi"});
    DiscretizedStep step;
    step.a = numbers(required(s, where, "a"), where + ".a");
    step.b = numbers(required(s, where, "b"), where + ".b");
    step.c = numbers(required(s, where, "c"), where + ".c");
    step.lo = numbers(required(s, where, "lo"), where + ".lo", -kInf);
    step.hi = numbers(required(s, where, "hi"), where + ".hi", kInf);
    const std::size_t m = step.a.size();
    if (step.b.size() != m || step.c.size() != m || step.lo.size() != m || step.hi.size() != m) {
      fail(where, "a, b, c, lo and hi must have equal lengths");
    }
    p.steps.push_back(std::move(step));
  }

  const json& ds = required(doc, "$", "delta_s");
  if (ds.is_array()) {
    p.delta_s = numbers(ds, "$.delta_s");
    p.uniform_delta_s = false;
  } else {
    set_uniform_spacing(p, number(ds, "$.delta_s"));
  }

  if (const auto it = doc.find("boundary"); it != doc.end()) {
    only_fields(*it, "$.boundary", {"x0", "xN"});
    if (const auto x0 = it->find("x0"); x0 != it->end()) {
      p.boundary.x0 = interval(*x0, "$.boundary.x0");
    }
    if (const auto xN = it->find("xN"); xN != it->end()) {
      p.boundary.xN = interval(*xN, "$.boundary.xN");
    }
  }

  if (const auto it = doc.find("costs"); it != doc.end()) {
    if (!it->is_array()) fail("$.costs", "expected an array");
    std::vector<QuadraticStepCost> costs;
    costs.reserve(it->size());
    for (std::size_t k = 0; k < it->size(); ++k) {
      const std::string where = "$.costs[" + std::to_string(k) + "]";
      const json& c = (*it)[k];
      only_fields(c, where, {"Q", "R", "N", "x_des", "u_des", "lin_x", "lin_u", "const"});
      QuadraticStepCost cost;
      cost.Q = number(required(c, where, "Q"), where + ".Q");
      cost.R = number(required(c, where, "R"), where + ".R");
      cost.Ncross = number(required(c, where, "N"), where + ".N");
      auto optional_field = [&](const char* name, double& dst) {
        if (const auto f = c.find(name); f != c.end()) dst = number(*f, where + "." + name);
      };
      optional_field("x_des", cost.x_des);
      optional_field("u_des", cost.u_des);
      optional_field("lin_x", cost.lin_x);
      optional_field("lin_u", cost.lin_u);
      optional_field("const", cost.offset);
      costs.push_back(cost);
    }
    p.costs = std::move(costs);
  }

  if (const auto it = doc.find("x_floor"); it != doc.end()) {
    p.x_floor = number(*it, "$.x_floor");
  }
  return p;
}

DiscretizedProblem read_problem(const std::filesystem::path& path) {
  return parse_problem(slurp(path));
}

std::string dump_problem(const DiscretizedProblem& problem) {
  ordered doc;
  const bool uniform = problem.uniform_delta_s && !problem.delta_s.empty() &&
                       std::all_of(problem.delta_s.begin(), problem.delta_s.end(),
                                   [&](double d) { return d == problem.delta_s.front(); });
  if (uniform) {
    doc["delta_s"] = problem.delta_s.front();
  } else {
    doc["delta_s"] = array_out(problem.delta_s);
  }
  ordered steps = ordered::array();
  for (const DiscretizedStep& s : problem.steps) {
    ordered row;
    row["a"] = array_out(s.a);
    row["b"] = array_out(s.b);
    row["c"] = array_out(s.c);
    row["lo"] = array_out(s.lo);
    row["hi"] = array_out(s.hi);
    steps.push_back(std::move(row));
  }
  doc["steps"] = std::move(steps);
  doc["boundary"] = {{"x0", interval_out(problem.boundary.x0)},
                     {"xN", interval_out(problem.boundary.xN)}};
  if (problem.costs) {
    ordered costs = ordered::array();
    for (const QuadraticStepCost& c : *problem.costs) {
      ordered o;
      o["Q"] = c.Q;
      o["R"] = c.R;
      o["N"] = c.Ncross;
      o["x_des"] = c.x_des;
      o["u_des"] = c.u_des;
      if (c.lin_x != 0.0) o["lin_x"] = c.lin_x;
      if (c.lin_u != 0.0) o["lin_u"] = c.lin_u;
      if (c.offset != 0.0) o["const"] = c.offset;
      costs.push_back(std::move(o));
    }
    doc["costs"] = std::move(costs);
  }
  doc["x_floor"] = problem.x_floor;
  return doc.dump() + "\n";
}

PathSamples parse_path(std::string_view text) {
  const json doc = parse_document(text);
  only_fields(doc, "$", {"grid", "q", "dq_ds", "d2q_ds2"});
  PathSamples path;
  path.grid = numbers(required(doc, "$", "grid"), "$.grid");
  path.q = vectors(required(doc, "$", "q"), "$.q");
  const Eigen::Index n = path.q.empty() ? 0 : path.q.front().size();
  auto derivative = [&](const char* name) {
    if (const auto it = doc.find(name); it != doc.end()) {
      return vectors(*it, std::string("$.") + name);
    }
    return std::vector<Eigen::VectorXd>(path.q.size(), Eigen::VectorXd::Zero(n));
  };
  path.dq_ds = derivative("dq_ds");
  path.d2q_ds2 = derivative("d2q_ds2");
  check_path(path);
  return path;
}

PathSamples read_path(const std::filesystem::path& path) { return parse_path(slurp(path)); }

std::string dump_path(const PathSamples& path) {
  ordered doc;
  doc["grid"] = array_out(path.grid);
  doc["q"] = vectors_out(path.q);
  doc["dq_ds"] = vectors_out(path.dq_ds);
  doc["d2q_ds2"] = vectors_out(path.d2q_ds2);
  return doc.dump() + "\n";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

void write_problem(const std::filesystem::path& path, const DiscretizedProblem& problem) {
  write_text(path, dump_problem(problem));
}

std::string dump_solution(const SolutionDocument& doc) {
  const SolutionProfile& p = doc.profile;
  ordered out;
  out["status"] = "ok";
  out["objective"] = to_string(p.objective);
  out["x"] = array_out(p.x);
  out["u"] = array_out(p.u);
  if (doc.timing) {
    out["t"] = array_out(doc.timing->t);
    out["duration"] = doc.timing->duration;
  } else {
    out["t"] = nullptr;
    out["duration"] = nullptr;
  }
  if (p.objective_value) out["objective_value"] = *p.objective_value;

  ordered diag;
  ordered segments = ordered::array();
  for (std::size_t s : p.diagnostics.segment_counts) segments.push_back(s);
  diag["segment_counts"] = std::move(segments);
  diag["max_row_violation"] = p.diagnostics.max_row_violation;
  diag["max_dynamics_residual"] = p.diagnostics.max_dynamics_residual;
  if (doc.untraversable_interval) diag["untraversable_interval"] = *doc.untraversable_interval;
  if (doc.include_reach) {
    ordered reach = ordered::array();
    for (const Interval& i : p.diagnostics.reach) reach.push_back(interval_out(i));
    diag["reach"] = std::move(reach);
  }
  if (doc.verification) {
    ordered v;
    v["max_x_deviation"] = doc.verification->max_x_deviation;
    if (doc.verification->objective_gap) v["objective_gap"] = *doc.verification->objective_gap;
    diag["verification"] = std::move(v);
  }
  out["diagnostics"] = std::move(diag);
  return out.dump(2) + "\n";
}

std::string dump_infeasible(const Infeasible& error) {
  ordered out;
  out["status"] = "infeasible";
  ordered rows = ordered::array();
  for (std::size_t r : error.rows()) rows.push_back(r);
  out["diagnostics"] = {{"step", error.step()}, {"rows", std::move(rows)},
                        {"message", error.what()}};
  return out.dump(2) + "\n";
}

}  // namespace qopp::io
