#include "ghostwalk/cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"

#include "ghostwalk/dynamics.hpp"
#include "ghostwalk/graph_io.hpp"
#include "ghostwalk/involution.hpp"
#include "ghostwalk/pfaffian.hpp"
#include "ghostwalk/prescribed.hpp"
#include "ghostwalk/spacetime.hpp"

namespace ghostwalk {

namespace {

using nlohmann::json;

class UsageError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

constexpr const char* kStateHelp =
    "final state, e.g. k=1,survivors=0,ghosts=(2,4);(6,6). Positions are lattice sites, or target ids/keys "
    "for --graph. Repeatable.";

struct Options {
  std::vector<int> lattice;
  std::string graph_file;
  int horizon = -1;
  std::vector<std::string> states;
  bool all_states = false;
  bool pfaffian = false;
  long long cap = 0;
  unsigned jobs = 1;
  std::string out_file;
  std::string format = "json";
  std::string tuples;
  int pair = 1;
  bool corrupt_formula = false;
};

int parse_int(std::string_view token) {
  while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
  while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
  int value = 0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (!token.empty() && token.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (token.empty() || ec != std::errc{} || ptr != last) {
    throw std::invalid_argument("expected an integer, got '" + std::string(token) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

struct Caps {
  std::size_t objects = kDefaultPathCap;
  OracleOptions oracle;
};

Caps caps_from(const Options& opts) {
  Caps caps;
  if (opts.cap < 0) throw UsageError("--cap must be positive");
  if (opts.cap > 0) {
    caps.objects = static_cast<std::size_t>(opts.cap);
    caps.oracle.max_walk_steps = static_cast<int>(std::floor(std::log2(static_cast<double>(opts.cap))));
  }
  if (opts.jobs == 0) throw UsageError("--jobs must be positive");
  caps.oracle.partitions = opts.jobs;
  return caps;
}

struct Instance {
  SpacetimeGraph graph;
  Configuration config;
  std::vector<int> starts;  // lattice runs only
  bool lattice = false;
  int horizon = 0;

  std::string id(int key) const { return graph.label(config.targets.vertex(key)); }

  KeyResolver resolver() const {
    return [this](std::string_view token) {
      if (!lattice) {
        if (auto v = graph.find(token)) {
          if (auto key = config.targets.key_of(*v)) return *key;
          throw std::invalid_argument("vertex '" + std::string(token) + "' is not a target");
        }
      }
      const int key = parse_int(token);
      if (!config.targets.contains(key)) throw std::invalid_argument("position " + std::to_string(key) + " is not a target");
      return key;
    };
  }
};

Instance load_instance(const Options& opts, bool same_parity) {
  const bool has_lattice = !opts.lattice.empty();
  const bool has_graph = !opts.graph_file.empty();
  if (has_lattice == has_graph) throw UsageError("give exactly one of --lattice or --graph");
  if (has_lattice) {
    if (opts.horizon < 0) throw UsageError("--lattice needs --t");
    if (same_parity) require_same_parity(opts.lattice);
    auto inst = make_lattice_instance(opts.lattice, opts.horizon);
    return {std::move(inst.graph), std::move(inst.config), opts.lattice, true, opts.horizon};
  }
  std::ifstream in(opts.graph_file);
  if (!in) throw UsageError("cannot open graph file '" + opts.graph_file + "'");
  auto spec = load_graph_spec(in);
  if (!spec.config) throw UsageError("graph file must list \"sources\" and \"targets\"");
  return {std::move(spec.graph), std::move(*spec.config), {}, false, spec.config->horizon.value_or(0)};
}

std::vector<FinalState> requested_states(const Options& opts, const Instance& inst, std::size_t cap, bool default_all) {
  std::vector<FinalState> states;
  const auto resolve = inst.resolver();
  for (const auto& spec : opts.states) states.push_back(parse_state_spec(spec, resolve));
  if (opts.all_states || (default_all && states.empty())) {
    const auto keys = reachable_keys(inst.graph, inst.config);
    auto all = all_final_states(static_cast<int>(inst.config.size()), keys, cap);
    states.insert(states.end(), all.begin(), all.end());
  }
  return states;
}

std::string csv_state(const Instance& inst, const FinalState& state) {
  std::string s = std::to_string(state.collisions()) + ",";
  for (std::size_t i = 0; i < state.survivors.size(); ++i) s += (i ? " " : "") + inst.id(state.survivors[i]);
  s += ",";
  for (std::size_t j = 0; j < state.ghost_pairs.size(); ++j) {
    s += (j ? " " : "") + inst.id(state.ghost_pairs[j].first) + ":" + inst.id(state.ghost_pairs[j].second);
  }
  return s;
}

void emit(const Options& opts, const std::string& payload, std::ostream& out) {
  if (opts.out_file.empty()) {
    out << payload;
    return;
  }
  std::ofstream file(opts.out_file);
  if (!file) throw UsageError("cannot write '" + opts.out_file + "'");
  file << payload;
}

void require_format(const Options& opts, bool csv_allowed) {
  if (opts.format == "json") return;
  if (opts.format == "csv" && csv_allowed) return;
  throw UsageError("unsupported --format '" + opts.format + "'");
}

json path_json(const SpacetimeGraph& graph, const Path& path) {
  json out = json::array();
  for (auto v : path) out.push_back(graph.label(v));
  return out;
}

// --- commands ---------------------------------------------------------------

int cmd_weight(const Options& opts, std::ostream& out, std::ostream& err) {
  require_format(opts, true);
  const auto caps = caps_from(opts);
  const auto inst = load_instance(opts, true);
  const auto states = requested_states(opts, inst, caps.objects, false);
  if (states.empty() && !opts.pfaffian) throw UsageError("weight needs --state, --all-states or --pfaffian");

  json records = json::array();
  std::string csv = "k,survivors,ghost_pairs,weight\n";
  Rational total(0);
  std::size_t listed = 0;
  for (const auto& state : states) {
    const Rational z = annihilation_weight(inst.graph, inst.config, state);
    total += z;
    if (opts.all_states && z.is_zero()) continue;
    ++listed;
    records.push_back({{"state", final_state_to_json(state, inst.graph, inst.config.targets)}, {"weight", z.str()}});
    csv += csv_state(inst, state) + "," + z.str() + "\n";
    if (!opts.all_states) err << to_string(state) << ": " << z << "\n";
  }
  json payload = {{"states", records}};
  if (opts.all_states) {
    payload["total"] = total.str();
    err << "states: " << listed << ", total: " << total << "\n";
  }
  if (opts.pfaffian) {
    const auto pf = pairwise_coalescence_weight(inst.graph, inst.config);
    payload["pfaffian"] = pf.str();
    err << "pfaffian: " << pf << "\n";
  }
  emit(opts, opts.format == "csv" ? csv : payload.dump(2) + "\n", out);
  return kExitOk;
}

int cmd_compare(const Options& opts, std::ostream& out, std::ostream& err) {
  require_format(opts, true);
  if (opts.lattice.empty()) throw UsageError("compare needs --lattice (the oracle simulates lattice walks)");
  const auto caps = caps_from(opts);
  const auto inst = load_instance(opts, true);
  const auto table = annihilation_distribution(inst.starts, inst.horizon, caps.oracle);

  std::map<FinalState, Rational> formula;
  bool corrupted = !opts.corrupt_formula;
  for (const auto& state :
       all_final_states(static_cast<int>(inst.config.size()), reachable_keys(inst.graph, inst.config), caps.objects)) {
    Rational z = annihilation_weight(inst.graph, inst.config, state);
    if (!corrupted && !z.is_zero()) {
      z += Rational::inverse_power_of_two(20);
      corrupted = true;
    }
    formula.emplace(state, z);
  }
  for (const auto& [state, p] : table) {
    if (!formula.contains(state)) formula.emplace(state, annihilation_weight(inst.graph, inst.config, state));
  }

  json records = json::array();
  std::string csv = "k,survivors,ghost_pairs,oracle,formula,match\n";
  std::size_t compared = 0;
  std::size_t mismatches = 0;
  Rational formula_total(0);
  for (const auto& [state, z] : formula) {
    formula_total += z;
    const Rational p = table.probability(state);
    if (z.is_zero() && p.is_zero()) continue;
    ++compared;
    const bool match = z == p;
    if (!match) ++mismatches;
    records.push_back({{"state", final_state_to_json(state, inst.graph, inst.config.targets)},
                       {"oracle", p.str()},
                       {"formula", z.str()},
                       {"match", match}});
    csv += csv_state(inst, state) + "," + p.str() + "," + z.str() + "," + (match ? "true" : "false") + "\n";
  }
  const Rational oracle_total = table.total();
  bool ok = mismatches == 0 && oracle_total == Rational(1) && formula_total == Rational(1);

  json payload = {{"starts", inst.starts},
                  {"horizon", inst.horizon},
                  {"states", records},
                  {"compared", compared},
                  {"mismatches", mismatches},
                  {"oracle_total", oracle_total.str()},
                  {"formula_total", formula_total.str()}};
  err << "states: " << compared << ", mismatches: " << mismatches << ", total: " << oracle_total << "\n";

  if (opts.pfaffian) {
    if (inst.starts.size() % 2 != 0) throw UsageError("--pfaffian needs an even number of walkers");
    const auto pf = pairwise_coalescence_weight(inst.graph, inst.config);
    Rational complete(0);
    for (const auto& [state, p] : table) {
      if (state.survivors.empty()) complete += p;
    }
    const auto coalescence = pairwise_coalescence_probability(inst.starts, inst.horizon, caps.oracle);
    const bool equal = pf == complete && complete == coalescence;
    ok = ok && equal;
    payload["pfaffian"] = {{"pfaffian", pf.str()},
                           {"complete_annihilation", complete.str()},
                           {"pairwise_coalescence", coalescence.str()},
                           {"equal", equal}};
    err << "pfaffian: " << pf << ", complete annihilation: " << complete << ", pairwise coalescence: " << coalescence
        << "\n";
  }
  emit(opts, opts.format == "csv" ? csv : payload.dump(2) + "\n", out);
  return ok ? kExitOk : kExitVerificationFailure;
}

int cmd_audit(const Options& opts, std::ostream& out, std::ostream& err) {
  require_format(opts, false);
  const auto caps = caps_from(opts);
  const auto inst = load_instance(opts, false);

  const auto crossing = check_crossing_property(inst.graph, inst.config, caps.objects);
  const auto consecutive = check_consecutive_collision_property(inst.graph, inst.config, caps.objects);
  json crossing_witnesses = json::array();
  for (const auto& v : crossing.violations) {
    crossing_witnesses.push_back({{"left_source", v.left_source},
                                  {"right_source", v.right_source},
                                  {"left_target", inst.id(v.left_target)},
                                  {"right_target", inst.id(v.right_target)},
                                  {"left_path", path_json(inst.graph, v.left_path)},
                                  {"right_path", path_json(inst.graph, v.right_path)}});
  }
  json consecutive_witnesses = json::array();
  for (const auto& v : consecutive.violations) {
    consecutive_witnesses.push_back({{"left_source", v.left_source},
                                     {"middle_source", v.middle_source},
                                     {"right_source", v.right_source},
                                     {"meeting", inst.graph.label(v.meeting)},
                                     {"left_path", path_json(inst.graph, v.left_path)},
                                     {"right_path", path_json(inst.graph, v.right_path)},
                                     {"middle_path", path_json(inst.graph, v.middle_path)}});
  }
  json payload = {{"planarity",
                   {{"crossing", {{"checked", crossing.checked}, {"violations", crossing.violation_count}, {"witnesses", crossing_witnesses}}},
                    {"consecutive",
                     {{"checked", consecutive.checked},
                      {"violations", consecutive.violation_count},
                      {"witnesses", consecutive_witnesses}}}}}};

  if (!crossing.holds() || !consecutive.holds()) {
    if (!crossing.holds()) err << "refused: crossing property fails (" << crossing.violation_count << " witnesses)\n";
    if (!consecutive.holds()) {
      err << "refused: consecutive collision property fails (" << consecutive.violation_count << " witnesses)\n";
    }
    emit(opts, payload.dump(2) + "\n", out);
    return kExitVerificationFailure;
  }

  const auto states = requested_states(opts, inst, caps.objects, true);
  AuditReport total;
  for (const auto& state : states) {
    CastingContext ctx(inst.graph, inst.config, state);
    total.merge(audit_involution(ctx, caps.objects));
  }
  payload["states"] = states.size();
  payload["audit"] = audit_report_to_json(total);
  err << "states: " << states.size() << ", castings: " << total.checked << ", fixed points: " << total.fixed_points
      << ", paired: " << total.paired << ", violations: " << total.violations.size() << "\n";
  emit(opts, payload.dump(2) + "\n", out);
  return total.passed() ? kExitOk : kExitVerificationFailure;
}

std::vector<std::vector<int>> parse_tuples(std::string_view text) {
  std::vector<std::vector<int>> tuples;
  for (auto row : split(text, ';')) {
    std::vector<int> tuple;
    for (auto token : split(row, ',')) tuple.push_back(parse_int(token));
    tuples.push_back(std::move(tuple));
  }
  return tuples;
}

int cmd_prescribed(const Options& opts, std::ostream& out, std::ostream& err) {
  require_format(opts, false);
  if (opts.tuples.empty() && opts.lattice.empty()) {
    const auto report = reproduce_prescribed_example();
    err << "inconsistent: " << std::boolalpha << report.analysis.inconsistent << "; minimal: " << report.analysis.minimal
        << "\n";
    if (!report.tuple_count_matches) err << "tuple count differs from the expected four tuples\n";
    emit(opts, report.to_json().dump(2) + "\n", out);
    return report.passed() ? kExitOk : kExitVerificationFailure;
  }

  const std::vector<int> starts = opts.lattice.empty() ? std::vector<int>{0, 2, 4} : opts.lattice;
  const int horizon = opts.horizon < 0 ? 4 : opts.horizon;
  require_same_parity(starts);
  const auto caps = caps_from(opts);
  if (static_cast<long>(starts.size()) * horizon > caps.oracle.max_walk_steps) {
    throw ResourceLimitError("prescribed weights need 2^(n*t) evolutions", static_cast<std::size_t>(caps.oracle.max_walk_steps));
  }
  const int pair = opts.pair - 1;
  const auto tuples = opts.tuples.empty() ? prescribed_tuples(starts, pair, horizon) : parse_tuples(opts.tuples);
  const auto analysis = analyze_system(build_system(starts, pair, horizon, tuples));
  if (analysis.inconsistent) {
    err << "inconsistent: true; minimal: " << std::boolalpha << analysis.minimal << "\n";
  } else {
    err << "consistent\n";
  }
  emit(opts, analysis.report.dump(2) + "\n", out);
  return kExitOk;
}

void add_instance_options(CLI::App* sub, Options& opts) {
  sub->add_option("--lattice", opts.lattice, "comma-separated start positions on Z")->delimiter(',');
  sub->add_option("--graph", opts.graph_file, "graph JSON file with sources and targets");
  sub->add_option("--t", opts.horizon, "horizon for --lattice")->check(CLI::NonNegativeNumber);
}

void add_common_options(CLI::App* sub, Options& opts) {
  sub->add_option("--cap", opts.cap, "cap on enumerated paths, castings and states; evolutions 2^(n*t) <= cap");
  sub->add_option("--jobs", opts.jobs, "parallel oracle partitions");
  sub->add_option("--out", opts.out_file, "write the payload here instead of stdout");
  sub->add_option("--format", opts.format, "json or csv");
}

}  // namespace

FinalState parse_state_spec(std::string_view spec, const KeyResolver& resolve) {
  const KeyResolver key = resolve ? resolve : KeyResolver([](std::string_view t) { return parse_int(t); });

  // Split at top-level commas that start a new `name=` part.
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  int depth = 0;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const char c = spec[i];
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (depth < 0) throw std::invalid_argument("state spec: unbalanced parentheses");
    if (c == ',' && depth == 0) {
      std::size_t j = i + 1;
      while (j < spec.size() && (std::isalpha(static_cast<unsigned char>(spec[j])) || spec[j] == '_')) ++j;
      if (j > i + 1 && j < spec.size() && spec[j] == '=') {
        parts.push_back(spec.substr(start, i - start));
        start = i + 1;
      }
    }
  }
  if (depth != 0) throw std::invalid_argument("state spec: unbalanced parentheses");
  parts.push_back(spec.substr(start));

  FinalState state;
  std::optional<int> k;
  for (auto part : parts) {
    const auto eq = part.find('=');
    if (eq == std::string_view::npos) throw std::invalid_argument("state spec: expected name=value, got '" + std::string(part) + "'");
    const auto name = part.substr(0, eq);
    const auto value = part.substr(eq + 1);
    if (name == "k") {
      k = parse_int(value);
    } else if (name == "survivors") {
      if (!value.empty()) {
        for (auto token : split(value, ',')) state.survivors.push_back(key(token));
      }
    } else if (name == "ghosts") {
      if (value.empty()) continue;
      for (auto group : split(value, ';')) {
        if (group.size() < 2 || group.front() != '(' || group.back() != ')') {
          throw std::invalid_argument("state spec: ghost pairs look like (a,b), got '" + std::string(group) + "'");
        }
        auto inner = split(group.substr(1, group.size() - 2), ',');
        if (inner.size() != 2) throw std::invalid_argument("state spec: a ghost pair needs two positions");
        state.ghost_pairs.emplace_back(key(inner[0]), key(inner[1]));
      }
    } else {
      throw std::invalid_argument("state spec: unknown field '" + std::string(name) + "'");
    }
  }
  if (k && *k != static_cast<int>(state.collisions())) {
    throw std::invalid_argument("state spec: k=" + std::to_string(*k) + " but " + std::to_string(state.collisions()) +
                                " ghost pairs given");
  }
  validate_final_state(state);
  return state;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options opts;
  CLI::App app{"Exact annihilating random walk weights with ghost particles"};
  app.name("ghostwalk");
  app.require_subcommand(1);

  auto* weight = app.add_subcommand("weight", "evaluate the ghost determinant for final states");
  add_instance_options(weight, opts);
  weight->add_option("--state", opts.states, kStateHelp);
  weight->add_flag("--all-states", opts.all_states, "every final state over reachable targets (nonzero ones listed)");
  weight->add_flag("--pfaffian", opts.pfaffian, "also print the Pfaffian of the pairwise matrix");
  add_common_options(weight, opts);

  auto* compare = app.add_subcommand("compare", "check every final state against exhaustive simulation");
  add_instance_options(compare, opts);
  compare->add_flag("--pfaffian", opts.pfaffian, "also compare Pfaffian, complete annihilation and pairwise coalescence");
  compare->add_flag("--corrupt-formula", opts.corrupt_formula)->group("");
  add_common_options(compare, opts);

  auto* audit = app.add_subcommand("audit", "planarity checks and the exhaustive involution audit");
  add_instance_options(audit, opts);
  audit->add_option("--state", opts.states, kStateHelp);
  audit->add_flag("--all-states", opts.all_states, "audit every final state (default when no --state is given)");
  add_common_options(audit, opts);

  auto* prescribed = app.add_subcommand("prescribed", "prescribed annihilation versus determinant products");
  add_instance_options(prescribed, opts);
  prescribed->add_option("--tuples", opts.tuples, "rows a,y1,...,b separated by ';'");
  prescribed->add_option("--pair", opts.pair, "1-based index of the lower walker of the annihilating pair");
  add_common_options(prescribed, opts);

  std::vector<std::string> argv_storage{"ghostwalk"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (weight->parsed()) return cmd_weight(opts, out, err);
    if (compare->parsed()) return cmd_compare(opts, out, err);
    if (audit->parsed()) return cmd_audit(opts, out, err);
    return cmd_prescribed(opts, out, err);
  } catch (const ResourceLimitError& e) {
    err << "resource cap exceeded: " << e.what() << "\n";
    return kExitResourceCap;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "verification failure: " << e.what() << "\n";
    return kExitVerificationFailure;
  }
}

}  // namespace ghostwalk
