#ifndef TPOLY_INSTANCES_HPP
#define TPOLY_INSTANCES_HPP

// Instance documents (JSON), seeded generation and perturbation.
//
// Transportation document:
//   {"version": 1, "kind": "transportation", "supplies": [5, 3],
//    "demands": [4, 2, 2], "forbidden_edges": [[1, 2]],
//    "trees": {"O": [[1, 1], [1, 2], [2, 2], [2, 3]]}}
// Network document:
//   {"version": 1, "kind": "network", "nodes": ["a", "b"],
//    "excesses": [1, -1], "arcs": [{"tail": "a", "head": "b", "capacity": 2}]}
// Arc endpoints are 1-based indices or node names; a capacity of "inf" is
// unbounded.  Edges are [supply, demand] pairs, 1-based.

#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "tpoly/core.hpp"
#include "tpoly/reduction.hpp"

namespace tpoly {

inline constexpr int kSchemaVersion = 1;

struct InstanceDocument {
  int version = kSchemaVersion;
  std::variant<TransportationInstance, Network> payload;
  std::map<std::string, std::vector<Edge>> trees;

  bool is_network() const { return std::holds_alternative<Network>(payload); }
  const TransportationInstance& transportation() const { return std::get<TransportationInstance>(payload); }
  const Network& network() const { return std::get<Network>(payload); }
};

namespace detail {

using nlohmann::json;

[[noreturn]] inline void parse_fail(const std::string& field, const std::string& what) {
  throw Error(ErrorKind::ParseError, field.empty() ? what : field + ": " + what);
}

inline std::int64_t json_integer(const json& j, const std::string& field) {
  if (!j.is_number_integer()) parse_fail(field, "expected an integer, got " + j.dump());
  return j.get<std::int64_t>();
}

inline std::vector<Flow> json_integers(const json& j, const std::string& field) {
  if (!j.is_array()) parse_fail(field, "expected an array of integers");
  std::vector<Flow> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(json_integer(j[k], field + "[" + std::to_string(k) + "]"));
  return out;
}

inline std::vector<Edge> json_edges(const json& j, const std::string& field) {
  if (!j.is_array()) parse_fail(field, "expected an array of [supply, demand] pairs");
  std::vector<Edge> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string where = field + "[" + std::to_string(k) + "]";
    if (!j[k].is_array() || j[k].size() != 2) parse_fail(where, "expected [supply, demand]");
    out.push_back(Edge{static_cast<int>(json_integer(j[k][0], where + "[0]")),
                       static_cast<int>(json_integer(j[k][1], where + "[1]"))});
  }
  return out;
}

inline void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& field) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) parse_fail(field.empty() ? key : field + "." + key, "unknown field");
  }
}

inline int json_endpoint(const json& j, const std::vector<std::string>& names, int nodes, const std::string& field) {
  if (j.is_string()) {
    for (std::size_t k = 0; k < names.size(); ++k)
      if (names[k] == j.get<std::string>()) return static_cast<int>(k) + 1;
    parse_fail(field, "unknown node name " + j.dump());
  }
  const auto idx = json_integer(j, field);
  if (idx < 1 || idx > nodes) parse_fail(field, "node index out of range");
  return static_cast<int>(idx);
}

inline json edges_json(const std::vector<Edge>& edges) {
  json out = json::array();
  for (const Edge& e : edges) out.push_back({e.supply, e.demand});
  return out;
}

// Line number of a byte offset, for parser diagnostics.
inline std::size_t line_of(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t k = 0; k < byte && k < text.size(); ++k)
    if (text[k] == '\n') ++line;
  return line;
}

}  // namespace detail

inline InstanceDocument parse_document(const std::string& text) {
  using detail::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ParseError, "line " + std::to_string(detail::line_of(text, e.byte)) + ": " + e.what());
  }
  if (!j.is_object()) detail::parse_fail("", "document must be an object");
  if (!j.contains("kind")) detail::parse_fail("kind", "missing");
  if (!j["kind"].is_string()) detail::parse_fail("kind", "expected a string");

  InstanceDocument doc;
  if (j.contains("version")) {
    doc.version = static_cast<int>(detail::json_integer(j["version"], "version"));
    if (doc.version != kSchemaVersion) detail::parse_fail("version", "unsupported version " + std::to_string(doc.version));
  }
  if (j.contains("trees")) {
    if (!j["trees"].is_object()) detail::parse_fail("trees", "expected an object of named edge lists");
    for (const auto& [name, edges] : j["trees"].items()) doc.trees[name] = detail::json_edges(edges, "trees." + name);
  }

  const std::string kind = j["kind"].get<std::string>();
  if (kind == "transportation") {
    detail::reject_unknown(j, {"version", "kind", "supplies", "demands", "forbidden_edges", "trees"}, "");
    if (!j.contains("supplies")) detail::parse_fail("supplies", "missing");
    if (!j.contains("demands")) detail::parse_fail("demands", "missing");
    TransportationInstance inst;
    inst.supplies = detail::json_integers(j["supplies"], "supplies");
    inst.demands = detail::json_integers(j["demands"], "demands");
    if (j.contains("forbidden_edges"))
      for (const Edge& e : detail::json_edges(j["forbidden_edges"], "forbidden_edges")) inst.forbidden.insert(e);
    const auto report = validate_instance(inst);
    if (!report.ok())
      detail::parse_fail("", std::string(to_string(report.problems.front().first)) + ": " + report.problems.front().second);
    for (const auto& [name, edges] : doc.trees)
      for (const Edge& e : edges)
        if (!inst.in_range(e)) detail::parse_fail("trees." + name, "edge " + to_string(e) + " out of range");
    doc.payload = std::move(inst);
  } else if (kind == "network") {
    detail::reject_unknown(j, {"version", "kind", "nodes", "excesses", "arcs"}, "");
    if (!j.contains("excesses")) detail::parse_fail("excesses", "missing");
    if (!j.contains("arcs")) detail::parse_fail("arcs", "missing");
    Network net;
    net.excess = detail::json_integers(j["excesses"], "excesses");
    if (j.contains("nodes")) {
      if (!j["nodes"].is_array()) detail::parse_fail("nodes", "expected an array of names");
      for (const auto& name : j["nodes"]) {
        if (!name.is_string()) detail::parse_fail("nodes", "names must be strings");
        net.names.push_back(name.get<std::string>());
      }
      if (net.names.size() != net.excess.size()) detail::parse_fail("nodes", "must have one name per excess");
    }
    if (!j["arcs"].is_array()) detail::parse_fail("arcs", "expected an array");
    for (std::size_t k = 0; k < j["arcs"].size(); ++k) {
      const auto& a = j["arcs"][k];
      const std::string where = "arcs[" + std::to_string(k) + "]";
      if (!a.is_object()) detail::parse_fail(where, "expected an object");
      detail::reject_unknown(a, {"tail", "head", "capacity"}, where);
      if (!a.contains("tail") || !a.contains("head") || !a.contains("capacity"))
        detail::parse_fail(where, "needs tail, head and capacity");
      Arc arc;
      arc.tail = detail::json_endpoint(a["tail"], net.names, net.node_count(), where + ".tail");
      arc.head = detail::json_endpoint(a["head"], net.names, net.node_count(), where + ".head");
      if (a["capacity"].is_string()) {
        if (a["capacity"].get<std::string>() != "inf") detail::parse_fail(where + ".capacity", "expected an integer or \"inf\"");
      } else {
        arc.capacity = detail::json_integer(a["capacity"], where + ".capacity");
      }
      net.arcs.push_back(arc);
    }
    if (!doc.trees.empty()) detail::parse_fail("trees", "network documents carry no trees");
    try {
      validate_network(net);
    } catch (const Error& e) {
      detail::parse_fail("", e.what());
    }
    doc.payload = std::move(net);
  } else {
    detail::parse_fail("kind", "expected \"transportation\" or \"network\"");
  }
  return doc;
}

inline std::string serialize_document(const InstanceDocument& doc) {
  using detail::json;
  std::ostringstream os;
  os << "{\n  \"version\": " << doc.version << ",\n";
  if (!doc.is_network()) {
    const auto& inst = doc.transportation();
    os << "  \"kind\": \"transportation\",\n";
    os << "  \"supplies\": " << json(inst.supplies).dump() << ",\n";
    os << "  \"demands\": " << json(inst.demands).dump() << ",\n";
    os << "  \"forbidden_edges\": "
       << detail::edges_json(std::vector<Edge>(inst.forbidden.begin(), inst.forbidden.end())).dump() << ",\n";
    os << "  \"trees\": {";
    std::size_t k = 0;
    for (const auto& [name, edges] : doc.trees)
      os << (k++ ? ",\n" : "\n") << "    " << json(name).dump() << ": " << detail::edges_json(edges).dump();
    os << (doc.trees.empty() ? "}\n" : "\n  }\n");
  } else {
    const auto& net = doc.network();
    os << "  \"kind\": \"network\",\n";
    if (!net.names.empty()) os << "  \"nodes\": " << json(net.names).dump() << ",\n";
    os << "  \"excesses\": " << json(net.excess).dump() << ",\n";
    os << "  \"arcs\": [";
    for (std::size_t a = 0; a < net.arcs.size(); ++a) {
      const Arc& arc = net.arcs[a];
      json entry;
      if (net.names.empty()) {
        entry["tail"] = arc.tail;
        entry["head"] = arc.head;
      } else {
        entry["tail"] = net.names[arc.tail - 1];
        entry["head"] = net.names[arc.head - 1];
      }
      entry["capacity"] = arc.capacity ? json(*arc.capacity) : json("inf");
      os << (a ? ",\n" : "\n") << "    {\"tail\": " << entry["tail"].dump() << ", \"head\": " << entry["head"].dump()
         << ", \"capacity\": " << entry["capacity"].dump() << "}";
    }
    os << (net.arcs.empty() ? "]\n" : "\n  ]\n");
  }
  os << "}\n";
  return os.str();
}

inline std::string serialize_instance(const TransportationInstance& inst) {
  return serialize_document(InstanceDocument{kSchemaVersion, inst, {}});
}

inline std::string serialize_network(const Network& net) {
  return serialize_document(InstanceDocument{kSchemaVersion, net, {}});
}

inline TransportationInstance parse_instance(const std::string& text) {
  auto doc = parse_document(text);
  if (doc.is_network()) throw Error(ErrorKind::ParseError, "kind: expected a transportation document");
  return doc.transportation();
}

inline Network parse_network(const std::string& text) {
  auto doc = parse_document(text);
  if (!doc.is_network()) throw Error(ErrorKind::ParseError, "kind: expected a network document");
  return doc.network();
}

// ---------------------------------------------------------------------------
// Random generation

/// mt19937_64 with a portable bounded draw (the standard distributions are
/// implementation-defined, so they are avoided for reproducibility).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform integer in [lo, hi].
  std::int64_t uniform(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(engine_());
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return lo + static_cast<std::int64_t>(x % span);
  }

  bool coin(std::uint64_t numerator, std::uint64_t denominator) {
    return static_cast<std::uint64_t>(uniform(0, static_cast<std::int64_t>(denominator) - 1)) < numerator;
  }

 private:
  std::mt19937_64 engine_;
};

/// Uniformly random composition of `total` into `parts` positive integers.
inline std::vector<Flow> random_composition(Rng& rng, Flow total, int parts) {
  std::set<Flow> cuts;
  while (static_cast<int>(cuts.size()) < parts - 1) cuts.insert(rng.uniform(1, total - 1));
  std::vector<Flow> out;
  Flow previous = 0;
  for (Flow c : cuts) {
    out.push_back(c - previous);
    previous = c;
  }
  out.push_back(total - previous);
  return out;
}

inline constexpr int kGenerationRetries = 10'000;

/// Random balanced instance with total margin in [max(N1, N2), margin_bound],
/// redrawn until it is non-degenerate.
inline TransportationInstance gen_random(std::uint64_t seed, int n1, int n2, Flow margin_bound) {
  if (n1 < 1 || n2 < 1) throw Error(ErrorKind::GenerationFailed, "dimensions must be positive");
  const Flow lowest = std::max(n1, n2);
  if (margin_bound < lowest)
    throw Error(ErrorKind::GenerationFailed, "margin bound " + std::to_string(margin_bound) + " below " +
                                                 std::to_string(lowest));
  Rng rng(seed);
  for (int attempt = 0; attempt < kGenerationRetries; ++attempt) {
    const Flow total = rng.uniform(lowest, margin_bound);
    TransportationInstance inst{random_composition(rng, total, n1), random_composition(rng, total, n2), {}};
    if (check_nondegenerate(inst)) return inst;
  }
  throw Error(ErrorKind::GenerationFailed, "no non-degenerate instance after " + std::to_string(kGenerationRetries) +
                                               " draws");
}

/// Random bounded network with n nodes and m arcs whose reduced face has
/// positive margins.  A random feasible flow is drawn first and the excesses
/// are read off from it, so the network is always feasible.  The underlying
/// undirected graph is connected; arcs are unbounded with probability
/// `infinite_percent`/100 as long as that keeps the network bounded.
inline Network gen_random_network(std::uint64_t seed, int n, int m, Flow capacity_bound, int infinite_percent = 0) {
  if (n < 2 || m < n - 1) throw Error(ErrorKind::GenerationFailed, "need n >= 2 and m >= n - 1 for a connected network");
  if (capacity_bound < 1) throw Error(ErrorKind::GenerationFailed, "capacity bound must be positive");
  Rng rng(seed);
  for (int attempt = 0; attempt < kGenerationRetries; ++attempt) {
    Network net;
    net.excess.assign(static_cast<std::size_t>(n), 0);
    // Random spanning tree first (node k attaches to an earlier node), then extra arcs.
    for (int k = 2; k <= n; ++k) {
      const int other = static_cast<int>(rng.uniform(1, k - 1));
      net.arcs.push_back(rng.coin(1, 2) ? Arc{k, other, {}} : Arc{other, k, {}});
    }
    while (net.arc_count() < m) {
      const int tail = static_cast<int>(rng.uniform(1, n));
      int head = static_cast<int>(rng.uniform(1, n - 1));
      if (head >= tail) ++head;
      net.arcs.push_back(Arc{tail, head, {}});
    }
    std::vector<Flow> x;
    for (Arc& arc : net.arcs) {
      const Flow flow_cap = rng.uniform(1, capacity_bound);
      if (!rng.coin(static_cast<std::uint64_t>(infinite_percent), 100)) arc.capacity = flow_cap;
      x.push_back(rng.uniform(0, flow_cap));
    }
    if (!check_bounded(net)) continue;
    for (int a = 0; a < m; ++a) {
      net.excess[net.arcs[a].tail - 1] += x[a];
      net.excess[net.arcs[a].head - 1] -= x[a];
    }
    try {
      reduce_to_transportation(net);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::NonPositiveMargin) continue;
      throw;
    }
    return net;
  }
  throw Error(ErrorKind::GenerationFailed, "no admissible network after " + std::to_string(kGenerationRetries) + " draws");
}

// ---------------------------------------------------------------------------
// Perturbation

/// Scales every margin by K = 2^(N1+1), adds 2^i to supply i and the sum of
/// those offsets to the last demand.  Supply-subset sums are then distinct
/// nonzero residues mod K (except the full set), so no proper subset pair can
/// balance.  Falls back to random offsets if verification fails.
inline TransportationInstance perturb_to_nondegenerate(const TransportationInstance& inst) {
  validate_instance(inst).throw_if_invalid();
  const int n1 = inst.supply_count();
  if (n1 + 1 >= 62) throw Error(ErrorKind::Overflow, "too many supplies to perturb");
  const Flow scale = Flow{1} << (n1 + 1);
  auto scaled = [&](Flow x) {
    if (x > std::numeric_limits<Flow>::max() / (2 * scale))
      throw Error(ErrorKind::Overflow, "margin too large to perturb");
    return x * scale;
  };
  TransportationInstance out = inst;
  Flow offsets = 0;
  for (int i = 1; i <= n1; ++i) {
    out.supplies[i - 1] = scaled(inst.supplies[i - 1]) + (Flow{1} << i);
    offsets += Flow{1} << i;
  }
  for (auto& v : out.demands) v = scaled(v);
  out.demands.back() += offsets;
  if (check_nondegenerate(out)) return out;

  Rng rng(static_cast<std::uint64_t>(inst.total_supply()) * 1'000'003u + static_cast<std::uint64_t>(n1));
  for (int attempt = 0; attempt < 1000; ++attempt) {
    TransportationInstance retry = inst;
    Flow sum = 0;
    for (auto& u : retry.supplies) {
      const Flow r = rng.uniform(1, scale - 1);
      u = scaled(u) + r;
      sum += r;
    }
    for (auto& v : retry.demands) v = scaled(v);
    retry.demands.back() += sum;
    if (check_nondegenerate(retry)) return retry;
  }
  throw Error(ErrorKind::PerturbationFailed, "could not perturb to a non-degenerate instance");
}

}  // namespace tpoly

#endif
