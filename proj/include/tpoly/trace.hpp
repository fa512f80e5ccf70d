#ifndef TPOLY_TRACE_HPP
#define TPOLY_TRACE_HPP

// Walk traces on disk and their independent replay.
//
// Line format, one record per line ('#' starts a comment):
//
//   tpoly-trace 1
//   origin (1,1) (1,2) (2,2) (2,3)
//   final (1,2) (1,3) (2,1) (2,2)
//   star_demand 1
//   initial_supply 1
//   iteration 1 sigma 1 insert (1,3) - leave (1,2) delta 2 next 2
//   iteration 2 sigma 2 shade (2,2) - leave none delta 2 next 2
//   ...
//   pivots 3

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tpoly/core.hpp"
#include "tpoly/oracle.hpp"
#include "tpoly/walk.hpp"

namespace tpoly {

struct TraceStep {
  int index = 0;
  int sigma = 0;
  WalkAction action = WalkAction::ShadeOnly;
  Edge edge;
  Sign sign = Sign::Plus;
  std::optional<Edge> leaving;
  int delta_prime = 0;
  std::optional<int> next_sigma;

  friend bool operator==(const TraceStep&, const TraceStep&) = default;
};

/// The instance-free part of a walk trace.
struct TraceRecord {
  std::vector<Edge> origin;
  std::vector<Edge> final_tree;
  int star_demand = 1;
  int initial_supply = 1;
  std::vector<TraceStep> steps;
  int pivots = 0;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

inline TraceRecord to_record(const WalkTrace& trace) {
  TraceRecord r;
  r.origin = trace.origin.edges();
  r.final_tree = trace.final_tree.edges();
  r.star_demand = trace.labeling.star_demand;
  r.initial_supply = trace.initial_supply;
  r.pivots = trace.pivot_count;
  for (const auto& it : trace.iterations)
    r.steps.push_back(TraceStep{it.index, it.sigma, it.action, it.edge, it.sign, it.leaving, it.delta_prime, it.next_sigma});
  return r;
}

inline std::string format_trace(const TraceRecord& r) {
  std::ostringstream os;
  os << "tpoly-trace 1\n";
  os << "origin " << detail::edge_list(r.origin) << "\n";
  os << "final " << detail::edge_list(r.final_tree) << "\n";
  os << "star_demand " << r.star_demand << "\n";
  os << "initial_supply " << r.initial_supply << "\n";
  for (const auto& s : r.steps) {
    os << "iteration " << s.index << " sigma " << s.sigma << " " << to_string(s.action) << " " << s.edge << " "
       << sign_char(s.sign) << " leave " << (s.leaving ? to_string(*s.leaving) : "none") << " delta " << s.delta_prime
       << " next " << (s.next_sigma ? std::to_string(*s.next_sigma) : "none") << "\n";
  }
  os << "pivots " << r.pivots << "\n";
  return os.str();
}

namespace detail {

[[noreturn]] inline void trace_fail(int line, const std::string& what) {
  throw Error(ErrorKind::ParseError, "trace line " + std::to_string(line) + ": " + what);
}

inline Edge parse_edge_token(const std::string& token, int line) {
  int i = 0;
  int j = 0;
  char open = 0, comma = 0, close = 0;
  std::istringstream is(token);
  if (!(is >> open >> i >> comma >> j >> close) || open != '(' || comma != ',' || close != ')' || is.peek() != EOF)
    trace_fail(line, "malformed edge '" + token + "'");
  return Edge{i, j};
}

inline int parse_int_token(const std::string& token, int line) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    trace_fail(line, "expected an integer, got '" + token + "'");
  }
}

inline void expect_word(std::istringstream& is, const char* word, int line) {
  std::string token;
  if (!(is >> token) || token != word) trace_fail(line, std::string("expected '") + word + "'");
}

inline std::string next_token(std::istringstream& is, int line) {
  std::string token;
  if (!(is >> token)) trace_fail(line, "unexpected end of line");
  return token;
}

}  // namespace detail

inline TraceRecord parse_trace(const std::string& text) {
  TraceRecord r;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  bool header = false, have_origin = false, have_final = false, have_pivots = false;
  while (std::getline(in, raw)) {
    ++line;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream is(raw);
    std::string key;
    if (!(is >> key)) continue;
    if (!header) {
      if (key != "tpoly-trace" || detail::next_token(is, line) != "1") detail::trace_fail(line, "expected 'tpoly-trace 1'");
      header = true;
      continue;
    }
    if (key == "origin" || key == "final") {
      std::vector<Edge> edges;
      std::string token;
      while (is >> token) edges.push_back(detail::parse_edge_token(token, line));
      (key == "origin" ? r.origin : r.final_tree) = edges;
      (key == "origin" ? have_origin : have_final) = true;
      continue;
    }
    if (key == "star_demand") {
      r.star_demand = detail::parse_int_token(detail::next_token(is, line), line);
    } else if (key == "initial_supply") {
      r.initial_supply = detail::parse_int_token(detail::next_token(is, line), line);
    } else if (key == "pivots") {
      r.pivots = detail::parse_int_token(detail::next_token(is, line), line);
      have_pivots = true;
    } else if (key == "iteration") {
      TraceStep s;
      s.index = detail::parse_int_token(detail::next_token(is, line), line);
      detail::expect_word(is, "sigma", line);
      s.sigma = detail::parse_int_token(detail::next_token(is, line), line);
      const std::string action = detail::next_token(is, line);
      if (action == "insert") s.action = WalkAction::InsertAndShade;
      else if (action == "shade") s.action = WalkAction::ShadeOnly;
      else detail::trace_fail(line, "unknown action '" + action + "'");
      s.edge = detail::parse_edge_token(detail::next_token(is, line), line);
      const std::string sign = detail::next_token(is, line);
      if (sign != "+" && sign != "-") detail::trace_fail(line, "expected + or -");
      s.sign = sign == "+" ? Sign::Plus : Sign::Minus;
      detail::expect_word(is, "leave", line);
      const std::string leave = detail::next_token(is, line);
      if (leave != "none") s.leaving = detail::parse_edge_token(leave, line);
      detail::expect_word(is, "delta", line);
      s.delta_prime = detail::parse_int_token(detail::next_token(is, line), line);
      detail::expect_word(is, "next", line);
      const std::string next = detail::next_token(is, line);
      if (next != "none") s.next_sigma = detail::parse_int_token(next, line);
      r.steps.push_back(s);
    } else {
      detail::trace_fail(line, "unknown record '" + key + "'");
    }
    std::string extra;
    if (is >> extra) detail::trace_fail(line, "trailing token '" + extra + "'");
  }
  if (!header) detail::trace_fail(line, "empty trace");
  if (!have_origin || !have_final || !have_pivots) detail::trace_fail(line, "trace needs origin, final and pivots records");
  return r;
}

inline nlohmann::json trace_json(const WalkTrace& trace, int bound) {
  using nlohmann::json;
  auto edges = [](const FlowedTree& t) {
    json out = json::array();
    for (const auto& [e, f] : t.flow) out.push_back({{"edge", {e.supply, e.demand}}, {"flow", f}});
    return out;
  };
  json j;
  j["star_demand"] = trace.labeling.star_demand;
  j["initial_supply"] = trace.initial_supply;
  j["origin"] = edges(trace.origin);
  j["final"] = edges(trace.final_tree);
  json labels = json::array();
  for (const auto& [e, s] : trace.labeling.label) labels.push_back({{"edge", {e.supply, e.demand}}, {"sign", std::string(1, sign_char(s))}});
  j["labels"] = labels;
  json iterations = json::array();
  for (const auto& it : trace.iterations) {
    json rec;
    rec["index"] = it.index;
    rec["sigma"] = it.sigma;
    rec["action"] = std::string(to_string(it.action));
    rec["edge"] = {it.edge.supply, it.edge.demand};
    rec["sign"] = std::string(1, sign_char(it.sign));
    rec["leaving"] = it.leaving ? json({it.leaving->supply, it.leaving->demand}) : json(nullptr);
    rec["delta_prime"] = it.delta_prime;
    rec["next_sigma"] = it.next_sigma ? json(*it.next_sigma) : json(nullptr);
    rec["tree"] = edges(it.tree);
    if (it.diagnostics) {
      rec["diagnostics"] = {{"sin_before", it.diagnostics->sin_before},
                            {"uno_after", std::string(to_string(it.diagnostics->uno_after))},
                            {"no_open_plus", it.diagnostics->no_open_plus},
                            {"no_all_plus_demand", it.diagnostics->no_all_plus_demand}};
    }
    iterations.push_back(rec);
  }
  j["iterations"] = iterations;
  j["iteration_count"] = trace.iterations.size();
  j["pivot_count"] = trace.pivot_count;
  j["bound"] = bound;
  return j;
}

// ---------------------------------------------------------------------------
// Replay

enum class VerifyFailure { None, Malformed, NotVertex, NotAdjacent, ShadedEdgeDeleted, NotFinal, PivotCountMismatch, BoundExceeded };

inline std::string_view to_string(VerifyFailure f) {
  switch (f) {
    case VerifyFailure::None: return "None";
    case VerifyFailure::Malformed: return "Malformed";
    case VerifyFailure::NotVertex: return "NotVertex";
    case VerifyFailure::NotAdjacent: return "NotAdjacent";
    case VerifyFailure::ShadedEdgeDeleted: return "ShadedEdgeDeleted";
    case VerifyFailure::NotFinal: return "NotFinal";
    case VerifyFailure::PivotCountMismatch: return "PivotCountMismatch";
    case VerifyFailure::BoundExceeded: return "BoundExceeded";
  }
  return "?";
}

struct VerifyVerdict {
  VerifyFailure failure = VerifyFailure::None;
  std::string detail;
  int pivots = 0;
  int bound = 0;

  bool pass() const { return failure == VerifyFailure::None; }
  std::string summary() const { return pass() ? "PASS" : "FAIL(" + std::string(to_string(failure)) + ")"; }
};

/// Replays a trace against the instance: every insertion must be a pivot to
/// an adjacent vertex that removes the recorded edge, no shaded edge may
/// leave, the walk must end at the final tree with all of it shaded, and the
/// pivot count must respect N1+N2-1-mu.
inline VerifyVerdict verify_trace(const TransportationInstance& inst, const TraceRecord& record) {
  VerifyVerdict v;
  auto fail = [&](VerifyFailure f, const std::string& what) {
    v.failure = f;
    v.detail = what;
    return v;
  };
  FlowedTree current;
  FlowedTree final_tree;
  try {
    current = flows_on_tree(inst, record.origin);
    final_tree = flows_on_tree(inst, record.final_tree);
  } catch (const Error& e) {
    return fail(VerifyFailure::NotVertex, e.what());
  }
  if (!is_vertex(current)) return fail(VerifyFailure::NotVertex, "origin has a negative flow");
  if (!is_vertex(final_tree)) return fail(VerifyFailure::NotVertex, "final tree has a negative flow");
  v.bound = inst.tree_size() - static_cast<int>(critical_pairs(inst).size());

  EdgeSet shaded;
  for (const auto& step : record.steps) {
    const std::string where = "iteration " + std::to_string(step.index) + ": ";
    if (!final_tree.contains(step.edge)) return fail(VerifyFailure::Malformed, where + to_string(step.edge) + " is not in the final tree");
    if (shaded.contains(step.edge)) return fail(VerifyFailure::Malformed, where + to_string(step.edge) + " shaded twice");
    if (step.action == WalkAction::ShadeOnly) {
      if (!current.contains(step.edge)) return fail(VerifyFailure::Malformed, where + "shades absent edge " + to_string(step.edge));
      if (step.leaving) return fail(VerifyFailure::Malformed, where + "shade-only step with a leaving edge");
    } else {
      if (current.contains(step.edge)) return fail(VerifyFailure::Malformed, where + "inserts present edge " + to_string(step.edge));
      if (!step.leaving) return fail(VerifyFailure::Malformed, where + "insertion without a leaving edge");
      PivotResult pivoted;
      try {
        pivoted = pivot(inst, current, step.edge);
      } catch (const Error& e) {
        return fail(VerifyFailure::NotAdjacent, where + e.what());
      }
      if (pivoted.leaving != *step.leaving)
        return fail(VerifyFailure::NotAdjacent, where + "removing " + to_string(*step.leaving) + " does not give an adjacent vertex (the pivot removes " +
                                                    to_string(pivoted.leaving) + ")");
      if (shaded.contains(pivoted.leaving))
        return fail(VerifyFailure::ShadedEdgeDeleted, where + "removes shaded " + to_string(pivoted.leaving));
      current = std::move(pivoted.tree);
      ++v.pivots;
    }
    shaded.insert(step.edge);
  }
  if (current.edge_set() != final_tree.edge_set() || shaded.size() != final_tree.size())
    return fail(VerifyFailure::NotFinal, "walk ends at " + detail::edge_list(current.edges()) + " with " +
                                             std::to_string(shaded.size()) + " shaded edges");
  if (v.pivots != record.pivots)
    return fail(VerifyFailure::PivotCountMismatch, "recorded " + std::to_string(record.pivots) + " pivots, replayed " +
                                                       std::to_string(v.pivots));
  if (v.pivots > v.bound)
    return fail(VerifyFailure::BoundExceeded, std::to_string(v.pivots) + " pivots > bound " + std::to_string(v.bound));
  return v;
}

}  // namespace tpoly

#endif
