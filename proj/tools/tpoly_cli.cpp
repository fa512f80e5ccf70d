// tpoly: command-line front end for walks, diameters, reductions and instance generation.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "tpoly/tpoly.hpp"

namespace {

using nlohmann::json;
using namespace tpoly;

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInternal = 3;

// Usage problems detected after CLI11 has accepted the arguments.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OutputOptions {
  std::string format = "text";
  std::string output;
};

std::string read_input(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw IoError("cannot write " + path);
}

// Prints the report in the requested format; --output always gets the JSON form.
void emit(const OutputOptions& opts, const std::string& text, const json& doc) {
  if (opts.format == "json")
    std::cout << doc.dump(2) << "\n";
  else
    std::cout << text;
  if (!opts.output.empty()) write_file(opts.output, doc.dump(2) + "\n");
}

void add_output_flags(CLI::App* cmd, OutputOptions& opts) {
  cmd->add_option("--format", opts.format, "Report format")->check(CLI::IsMember({"text", "json"}));
  cmd->add_option("--output", opts.output, "Also write the structured report to this file");
}

json edges_json(const std::vector<Edge>& edges) {
  json out = json::array();
  for (const Edge& e : edges) out.push_back({e.supply, e.demand});
  return out;
}

json edges_json(const EdgeSet& edges) { return edges_json(std::vector<Edge>(edges.begin(), edges.end())); }

std::string join(const std::vector<Flow>& xs) {
  std::ostringstream os;
  for (std::size_t k = 0; k < xs.size(); ++k) os << (k ? " " : "") << xs[k];
  return os.str();
}

std::string describe(const TransportationInstance& inst) {
  std::ostringstream os;
  os << inst.supply_count() << "x" << inst.demand_count() << "  supplies " << join(inst.supplies) << "  demands "
     << join(inst.demands);
  if (inst.is_face()) os << "  forbidden " << inst.forbidden.size();
  return os.str();
}

// A tree argument is either a name from the document's trees or an inline
// list such as "1-1,1-2,2-2".
std::vector<Edge> resolve_tree(const InstanceDocument& doc, const std::string& arg) {
  if (auto it = doc.trees.find(arg); it != doc.trees.end()) return it->second;
  if (arg.find('-') == std::string::npos)
    throw Error(ErrorKind::ParseError, "tree '" + arg + "' is not defined in the document");
  std::vector<Edge> edges;
  std::stringstream ss(arg);
  std::string item;
  while (std::getline(ss, item, ',')) {
    int i = 0, j = 0;
    char dash = 0;
    std::istringstream is(item);
    if (!(is >> i >> dash >> j) || dash != '-' || is.peek() != EOF)
      throw Error(ErrorKind::ParseError, "malformed edge '" + item + "' in tree '" + arg + "'");
    edges.push_back(Edge{i, j});
  }
  return edges;
}

TransportationInstance load_transportation(const std::string& path, InstanceDocument* doc_out = nullptr) {
  auto doc = parse_document(read_input(path));
  if (doc.is_network()) throw Error(ErrorKind::ParseError, path + ": expected a transportation document");
  auto inst = doc.transportation();
  if (doc_out) *doc_out = std::move(doc);
  return inst;
}

// ---------------------------------------------------------------------------
// walk

struct WalkArgs {
  std::string instance;
  std::string origin = "O";
  std::string final_tree = "F";
  int star_demand = 1;
  int initial_supply = 1;
  bool exhaustive = false;
  bool verify = false;
  std::string trace_out;
  OutputOptions out;
};

std::string diagnostics_cell(const WalkIteration& it) {
  if (!it.diagnostics) return "";
  const auto& d = *it.diagnostics;
  std::ostringstream os;
  os << "  SIN " << (d.sin_before ? "ok" : "FAIL") << "  UNO " << to_string(d.uno_after) << "  open+ "
     << (d.no_open_plus ? "ok" : "FAIL") << "  all+ " << (d.no_all_plus_demand ? "ok" : "FAIL");
  return os.str();
}

int run_walk(const WalkArgs& a) {
  InstanceDocument doc;
  const auto inst = load_transportation(a.instance, &doc);
  const auto origin = flows_on_tree(inst, resolve_tree(doc, a.origin));
  const auto final_tree = flows_on_tree(inst, resolve_tree(doc, a.final_tree));
  const int mu = static_cast<int>(critical_pairs(inst).size());
  const int bound = inst.tree_size() - mu;

  if (a.exhaustive) {
    const auto r = hirsch_walk_exhaustive(inst, origin, final_tree, a.verify);
    std::ostringstream os;
    os << "instance " << describe(inst) << "\n";
    os << "pivot counts by star demand (rows) and initial supply (columns)\n";
    os << "      ";
    for (int s = 1; s <= inst.supply_count(); ++s) os << std::setw(5) << ("s" + std::to_string(s));
    os << "\n";
    for (int d = 1; d <= inst.demand_count(); ++d) {
      os << std::setw(6) << ("d" + std::to_string(d));
      for (int s = 1; s <= inst.supply_count(); ++s) os << std::setw(5) << r.pivot_counts[d - 1][s - 1];
      os << "\n";
    }
    os << "minimum pivots " << r.best_pivot_count << " (star demand " << r.best_star_demand << ", initial supply "
       << r.best_initial_supply << ")\n";
    os << "bound " << bound << " (N1+N2-1-mu, mu=" << mu << ")\n";
    if (a.verify) os << "diagnostics: all UNO/SIN checks passed\n";
    json j{{"pivot_counts", r.pivot_counts},
           {"best_pivot_count", r.best_pivot_count},
           {"best_star_demand", r.best_star_demand},
           {"best_initial_supply", r.best_initial_supply},
           {"bound", bound},
           {"mu", mu},
           {"verified", a.verify}};
    emit(a.out, os.str(), j);
    return kExitOk;
  }

  const auto trace = hirsch_walk(inst, origin, final_tree, WalkOptions{a.star_demand, a.initial_supply, a.verify});
  if (!a.trace_out.empty()) write_file(a.trace_out, format_trace(to_record(trace)));

  std::ostringstream os;
  os << "instance " << describe(inst) << "\n";
  os << "star demand " << a.star_demand << ", initial supply " << a.initial_supply << "\n";
  os << "iter  sigma  action  edge   sign  leaves  delta'  next\n";
  for (const auto& it : trace.iterations) {
    os << std::setw(4) << it.index << std::setw(7) << it.sigma << "  " << std::left << std::setw(6)
       << to_string(it.action) << "  " << std::setw(5) << to_string(it.edge) << std::right << std::setw(6)
       << sign_char(it.sign) << "  " << std::left << std::setw(6) << (it.leaving ? to_string(*it.leaving) : "-")
       << std::right << std::setw(8) << it.delta_prime << std::setw(6)
       << (it.next_sigma ? std::to_string(*it.next_sigma) : "-") << diagnostics_cell(it) << "\n";
  }
  os << "pivots " << trace.pivot_count << "\n";
  os << "bound " << bound << " (N1+N2-1-mu, mu=" << mu << ")\n";
  if (a.verify) os << "diagnostics: all UNO/SIN checks passed\n";
  emit(a.out, os.str(), trace_json(trace, bound));
  return kExitOk;
}

// ---------------------------------------------------------------------------
// diameter / analyze

struct AnalyzeArgs {
  std::string instance;
  std::uint64_t budget = kDefaultTreeBudget;
  OutputOptions out;
};

TransportationInstance load_for_analysis(const std::string& path, std::string& note) {
  const auto doc = parse_document(read_input(path));
  if (!doc.is_network()) return doc.transportation();
  const auto map = reduce_to_transportation(doc.network());
  note = "network reduced to a " + std::to_string(map.target.supply_count()) + "x" +
         std::to_string(map.target.demand_count()) + " face; network bound m+n-1 = " + std::to_string(map.bound()) + "\n";
  return map.target;
}

json analysis_json(const TransportationInstance& inst, const InstanceAnalysis& a) {
  return json{{"supplies", inst.supplies},
              {"demands", inst.demands},
              {"face", a.face},
              {"nondegenerate", a.nondegenerate},
              {"vertex_count", a.vertex_count},
              {"skeleton_edge_count", a.skeleton_edge_count},
              {"mu", a.mu},
              {"critical_pairs", edges_json(a.critical)},
              {"dimension", a.dimension},
              {"facet_count", a.facet_count},
              {"hirsch_bound", a.hirsch_bound},
              {"walk_bound", a.walk_bound},
              {"diameter", a.diameter},
              {"within_bound", a.diameter <= a.hirsch_bound}};
}

int run_analyze(const AnalyzeArgs& args, bool full) {
  std::string note;
  const auto inst = load_for_analysis(args.instance, note);
  const auto a = analyze(inst, args.budget);
  std::ostringstream os;
  os << note;
  os << "instance        " << describe(inst) << "\n";
  os << "vertices        " << a.vertex_count << "\n";
  if (full) {
    os << "skeleton edges  " << a.skeleton_edge_count << "\n";
    os << "non-degenerate  " << (a.nondegenerate ? "yes" : "no") << (a.face ? " (face, heuristic test)" : "") << "\n";
    os << "critical pairs  " << a.mu;
    for (const Edge& e : a.critical) os << " " << e;
    os << "\n";
    os << "dimension       " << a.dimension << "\n";
    os << "facets          " << a.facet_count << "\n";
  } else {
    os << "mu              " << a.mu << "\n";
  }
  os << "hirsch bound    " << a.hirsch_bound << " (facets - dimension)\n";
  if (!a.face) os << "N1+N2-1-mu      " << a.walk_bound << "\n";
  os << "diameter        " << a.diameter << "\n";
  os << "bound check     " << (a.diameter <= a.hirsch_bound ? "ok" : "VIOLATED") << "\n";
  emit(args.out, os.str(), analysis_json(inst, a));
  return kExitOk;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyArgs {
  std::string trace;
  std::string instance;
  OutputOptions out;
};

int run_verify(const VerifyArgs& a) {
  const auto record = parse_trace(read_input(a.trace));
  const auto inst = load_transportation(a.instance);
  const auto v = verify_trace(inst, record);
  std::ostringstream os;
  os << v.summary() << "\n";
  if (!v.pass()) os << v.detail << "\n";
  os << "pivots " << v.pivots << ", bound " << v.bound << "\n";
  emit(a.out, os.str(),
       json{{"verdict", v.summary()}, {"pass", v.pass()}, {"detail", v.detail}, {"pivots", v.pivots}, {"bound", v.bound}});
  // A failed verdict is a result, not an error in the tool.
  return v.pass() ? kExitOk : kExitDomain;
}

// ---------------------------------------------------------------------------
// reduce

struct ReduceArgs {
  std::string network;
  std::string instance_out;
  OutputOptions out;
};

int run_reduce(const ReduceArgs& a) {
  const auto net = parse_network(read_input(a.network));
  const auto map = reduce_to_transportation(net);
  const auto identity = verify_incidence_identity(net);
  const std::string document = serialize_instance(map.target);
  if (!a.instance_out.empty()) write_file(a.instance_out, document);

  std::ostringstream os;
  os << "network         " << net.node_count() << " nodes, " << net.arc_count() << " arcs\n";
  os << "supplies        " << join(map.target.supplies) << "\n";
  os << "demands         " << join(map.target.demands) << "\n";
  os << "arc  tail  head  capacity  demand  allowed edges\n";
  for (int k = 0; k < net.arc_count(); ++k) {
    const Arc& arc = net.arcs[k];
    os << std::setw(3) << k + 1 << std::setw(6) << net.node_name(arc.tail) << std::setw(6) << net.node_name(arc.head)
       << std::setw(10) << (arc.capacity ? std::to_string(*arc.capacity) : "inf") << std::setw(8)
       << map.arc_to_demand[k] << "  " << map.tail_edge(k) << " " << map.head_edge(k) << "\n";
  }
  os << "incidence check " << (identity ? "ok" : "FAILED") << "\n";
  os << "bound m+n-1     " << map.bound() << "\n";
  if (a.instance_out.empty()) os << "\n" << document;

  json j{{"supplies", map.target.supplies},
         {"demands", map.target.demands},
         {"arc_to_demand", map.arc_to_demand},
         {"allowed_edges", edges_json(map.target.allowed_edges())},
         {"incidence_identity", static_cast<bool>(identity)},
         {"transformed_excess", identity.split_excess},
         {"bound", map.bound()},
         {"instance", json::parse(document)}};
  emit(a.out, os.str(), j);
  if (!identity) throw Error(ErrorKind::BoundViolation, "incidence-matrix identity failed");
  return kExitOk;
}

// ---------------------------------------------------------------------------
// gen

struct GenArgs {
  std::uint64_t seed = 1;
  std::string dims;
  Flow margin_bound = 100;
  bool network = false;
  Flow capacity_bound = 5;
  int infinite_percent = 0;
  bool perturb = false;
  OutputOptions out;
};

std::pair<int, int> parse_dims(const std::string& dims) {
  int a = 0, b = 0;
  char x = 0;
  std::istringstream is(dims);
  if (!(is >> a >> x >> b) || (x != 'x' && x != 'X') || is.peek() != EOF || a < 1 || b < 1)
    throw UsageError("dimensions must look like 3x4, got '" + dims + "'");
  return {a, b};
}

int run_gen(const GenArgs& a) {
  const auto [p, q] = parse_dims(a.dims);
  std::string document;
  if (a.network) {
    document = serialize_network(gen_random_network(a.seed, p, q, a.capacity_bound, a.infinite_percent));
  } else {
    auto inst = gen_random(a.seed, p, q, a.margin_bound);
    if (a.perturb) inst = perturb_to_nondegenerate(inst);
    document = serialize_instance(inst);
  }
  std::cout << document;
  if (!a.out.output.empty()) write_file(a.out.output, document);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// sharp-search

struct SharpArgs {
  std::string dims;
  std::uint64_t seed = 1;
  double time_budget = 10.0;
  Flow margin_bound = 40;
  std::uint64_t budget = kDefaultTreeBudget;
  std::string instance_out;
  OutputOptions out;
};

// Moves one unit of margin between two supplies or two demands.
TransportationInstance mutate(const TransportationInstance& inst, Rng& rng) {
  auto out = inst;
  auto& side = rng.coin(1, 2) ? out.supplies : out.demands;
  if (side.size() < 2) return out;
  const auto from = static_cast<std::size_t>(rng.uniform(0, static_cast<std::int64_t>(side.size()) - 1));
  auto to = static_cast<std::size_t>(rng.uniform(0, static_cast<std::int64_t>(side.size()) - 2));
  if (to >= from) ++to;
  const Flow amount = rng.uniform(1, std::max<Flow>(1, side[from] / 2));
  if (side[from] - amount < 1) return out;
  side[from] -= amount;
  side[to] += amount;
  return out;
}

int run_sharp_search(const SharpArgs& a) {
  const auto [n1, n2] = parse_dims(a.dims);
  const int ceiling = n1 + n2 - 1;
  Rng rng(a.seed);
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };

  std::optional<TransportationInstance> best;
  int best_diameter = -1, best_mu = 0;
  std::optional<TransportationInstance> best_free;  // best among instances without critical pairs
  int best_free_diameter = -1;
  std::uint64_t candidates = 0;

  while (elapsed() < a.time_budget) {
    TransportationInstance inst;
    if (best_free && rng.coin(1, 2)) {
      inst = mutate(*best_free, rng);
      if (!check_nondegenerate(inst)) continue;
    } else {
      inst = gen_random(rng.uniform(0, std::numeric_limits<std::int64_t>::max()), n1, n2, a.margin_bound);
    }
    ++candidates;
    const int mu = static_cast<int>(critical_pairs_closed_form(inst).size());
    const int d = diameter(build_skeleton(enumerate_vertices(inst, a.budget)));
    if (d > best_diameter) {
      best = inst;
      best_diameter = d;
      best_mu = mu;
    }
    if (mu == 0 && d >= best_free_diameter) {
      best_free = inst;
      best_free_diameter = d;
    }
    if (best_free_diameter == ceiling) break;
  }

  std::ostringstream os;
  os << "searched        " << candidates << " non-degenerate " << n1 << "x" << n2 << " instances in " << std::fixed
     << std::setprecision(2) << elapsed() << " s\n";
  os << "N1+N2-1         " << ceiling << "\n";
  json j{{"candidates", candidates}, {"ceiling", ceiling}, {"seconds", elapsed()}};
  if (best) {
    os << "max diameter    " << best_diameter << " (mu=" << best_mu << ", bound " << ceiling - best_mu << ")  "
       << describe(*best) << "\n";
    j["max_diameter"] = best_diameter;
    j["max_diameter_instance"] = json::parse(serialize_instance(*best));
  }
  if (best_free) {
    os << "without critical pairs: max diameter " << best_free_diameter << "  " << describe(*best_free) << "\n";
    j["max_diameter_no_critical"] = best_free_diameter;
    j["no_critical_instance"] = json::parse(serialize_instance(*best_free));
  }
  os << (best_free_diameter == ceiling ? "attained N1+N2-1\n" : "N1+N2-1 not attained within the budget\n");
  if (!a.instance_out.empty() && (best_free || best))
    write_file(a.instance_out, serialize_instance(best_free ? *best_free : *best));
  emit(a.out, os.str(), j);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Walks, diameters and reductions on transportation polytopes"};
  app.require_subcommand(1);

  WalkArgs walk;
  auto* walk_cmd = app.add_subcommand("walk", "Run the shading walk between two vertices");
  walk_cmd->add_option("instance", walk.instance, "Instance document ('-' for stdin)")->required();
  walk_cmd->add_option("--origin", walk.origin, "Start tree: document name or inline list like 1-1,1-2");
  walk_cmd->add_option("--final", walk.final_tree, "Target tree: document name or inline list");
  walk_cmd->add_option("--star-demand", walk.star_demand, "Demand node the labels are rooted at");
  walk_cmd->add_option("--initial-supply", walk.initial_supply, "First supply node");
  walk_cmd->add_flag("--exhaustive", walk.exhaustive, "Try every star demand and initial supply");
  walk_cmd->add_flag("--verify", walk.verify, "Check UNO/SIN after every iteration");
  walk_cmd->add_option("--trace-out", walk.trace_out, "Write the line-oriented trace here");
  add_output_flags(walk_cmd, walk.out);

  AnalyzeArgs diam, full;
  auto* diam_cmd = app.add_subcommand("diameter", "Exact diameter of the vertex graph");
  auto* analyze_cmd = app.add_subcommand("analyze", "Vertices, critical pairs, facets and diameter");
  for (auto [cmd, args] : {std::pair{diam_cmd, &diam}, std::pair{analyze_cmd, &full}}) {
    cmd->add_option("instance", args->instance, "Instance or network document ('-' for stdin)")->required();
    cmd->add_option("--budget", args->budget, "Maximum number of spanning trees to enumerate");
    add_output_flags(cmd, args->out);
  }

  VerifyArgs verify;
  auto* verify_cmd = app.add_subcommand("verify", "Replay a walk trace");
  verify_cmd->add_option("trace", verify.trace, "Trace file ('-' for stdin)")->required();
  verify_cmd->add_option("instance", verify.instance, "Instance document")->required();
  add_output_flags(verify_cmd, verify.out);

  ReduceArgs reduce;
  auto* reduce_cmd = app.add_subcommand("reduce", "Reduce a network to a transportation face");
  reduce_cmd->add_option("network", reduce.network, "Network document ('-' for stdin)")->required();
  reduce_cmd->add_option("--instance-out", reduce.instance_out, "Write the face document here");
  add_output_flags(reduce_cmd, reduce.out);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a random non-degenerate instance or a network");
  gen_cmd->add_option("dims", gen.dims, "N1xN2, or NODESxARCS with --network")->required();
  gen_cmd->add_option("--seed", gen.seed, "Random seed");
  gen_cmd->add_option("--margin-bound", gen.margin_bound, "Largest margin total");
  gen_cmd->add_flag("--network", gen.network, "Generate a network document");
  gen_cmd->add_option("--capacity-bound", gen.capacity_bound, "Largest arc capacity (networks)");
  gen_cmd->add_option("--infinite-percent", gen.infinite_percent, "Chance of an unbounded arc (networks)")
      ->check(CLI::Range(0, 100));
  gen_cmd->add_flag("--perturb", gen.perturb, "Apply the dyadic perturbation to the result");
  gen_cmd->add_option("--output", gen.out.output, "Also write the document to this file");

  SharpArgs sharp;
  auto* sharp_cmd = app.add_subcommand("sharp-search", "Search for instances with large diameter");
  sharp_cmd->add_option("dims", sharp.dims, "N1xN2")->required();
  sharp_cmd->add_option("--seed", sharp.seed, "Random seed");
  sharp_cmd->add_option("--time-budget", sharp.time_budget, "Seconds to search")->check(CLI::PositiveNumber);
  sharp_cmd->add_option("--margin-bound", sharp.margin_bound, "Largest margin total");
  sharp_cmd->add_option("--budget", sharp.budget, "Maximum number of spanning trees per instance");
  sharp_cmd->add_option("--instance-out", sharp.instance_out, "Write the best instance here");
  add_output_flags(sharp_cmd, sharp.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*walk_cmd) return run_walk(walk);
    if (*diam_cmd) return run_analyze(diam, false);
    if (*analyze_cmd) return run_analyze(full, true);
    if (*verify_cmd) return run_verify(verify);
    if (*reduce_cmd) return run_reduce(reduce);
    if (*gen_cmd) return run_gen(gen);
    if (*sharp_cmd) return run_sharp_search(sharp);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const Error& e) {
    if (is_internal(e.kind())) {
      std::cerr << "internal error: " << e.what() << "\n";
      return kExitInternal;
    }
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}
