// Command-line front end: evaluate, scan, verify-bounds, gen-state, identities.
//
// Exit codes: 0 success (violations are results), 2 input error,
// 3 state invariant failure, 4 correctness alarm.

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ssikit/io.hpp"

namespace {

using ssikit::json;

constexpr int kExitInput = 2;
constexpr int kExitState = 3;
constexpr int kExitAlarm = 4;

/// Reads --config files written as (possibly nested) JSON objects whose keys
/// are option names; nested objects address subcommands.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    json j;
    for (const CLI::Option* opt : app->get_options({})) {
      if (opt->get_lnames().empty() || opt->get_configurable() == false) continue;
      const std::string name = opt->get_lnames().front();
      if (opt->count() > 0) {
        j[name] = opt->results().size() == 1 ? json(opt->results().front()) : json(opt->results());
      } else if (default_also && !opt->get_default_str().empty()) {
        j[name] = opt->get_default_str();
      }
    }
    return j.dump(2);
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    json j;
    try {
      input >> j;
    } catch (const json::exception& e) {
      throw CLI::ConversionError(std::string("config file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config file must hold a JSON object");
    std::vector<CLI::ConfigItem> items;
    collect(j, {}, items);
    return items;
  }

 private:
  static std::string scalar(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

  static void collect(const json& obj, const std::vector<std::string>& parents, std::vector<CLI::ConfigItem>& out) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (it->is_object()) {
        auto p = parents;
        p.push_back(it.key());
        collect(*it, p, out);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = it.key();
      if (it->is_array()) {
        for (const auto& e : *it) item.inputs.push_back(scalar(e));
      } else if (it->is_boolean()) {
        item.inputs = {it->get<bool>() ? "true" : "false"};
      } else {
        item.inputs = {scalar(*it)};
      }
      out.push_back(std::move(item));
    }
  }
};

struct Globals {
  bool no_manifest = false;
  std::size_t dim_cap = ssikit::kDefaultDimCap;
  ssikit::Tolerances tol;
};

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Collects everything that belongs in the manifest. Only this object holds
/// timestamps, so --no-manifest output is byte-reproducible.
class Manifest {
 public:
  Manifest(const CLI::App& sub, const Globals& g) : start_(std::chrono::steady_clock::now()), started_at_(utc_now()) {
    command_ = sub.get_name();
    for (const CLI::Option* opt : sub.get_options({})) {
      if (opt->count() == 0 || opt->get_lnames().empty()) continue;
      const auto& r = opt->results();
      params_[opt->get_lnames().front()] = r.size() == 1 ? json(r.front()) : json(r);
    }
    params_["dim-cap"] = g.dim_cap;
    params_["tol-violate"] = g.tol.violate;
  }

  void set_seed(std::uint64_t seed) { seed_ = seed; }
  void add_output(const std::string& path) { outputs_.push_back(path); }

  json to_json() const {
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    return {{"command", command_},
            {"parameters", params_},
            {"seed", seed_ ? json(*seed_) : json(nullptr)},
            {"tool_version", ssikit::kToolVersion},
            {"started_at", started_at_},
            {"wall_time_s", wall},
            {"outputs", outputs_}};
  }

 private:
  std::chrono::steady_clock::time_point start_;
  std::string started_at_;
  std::string command_;
  json params_ = json::object();
  std::optional<std::uint64_t> seed_;
  std::vector<std::string> outputs_;
};

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ssikit::InputError("cannot write " + path);
  out << text;
}

/// Writes `body` with the manifest embedded under "manifest" unless disabled.
void emit_json(json body, const std::string& path, Manifest& manifest, const Globals& g) {
  if (!path.empty() && path != "-") manifest.add_output(path);
  if (!g.no_manifest) body["manifest"] = manifest.to_json();
  write_text(path, body.dump(2) + "\n");
}

std::vector<std::string> split_list(const std::vector<std::string>& raw) {
  std::vector<std::string> out;
  for (const auto& item : raw) {
    std::stringstream ss(item);
    std::string part;
    while (std::getline(ss, part, ',')) {
      if (!part.empty()) out.push_back(part);
    }
  }
  return out;
}

ssikit::CriteriaRequest make_request(const std::vector<std::string>& criteria, const std::string& set,
                                     const std::vector<std::string>& index_sets, bool all_i, const std::string& axis) {
  ssikit::CriteriaRequest req;
  req.ids = split_list(criteria);
  if (req.ids.empty()) throw ssikit::InputError("no criteria selected");
  req.set_name = set;
  for (const auto& s : index_sets) req.index_sets.push_back(ssikit::parse_index_list(s));
  req.all_index_sets = all_i;
  req.squeezed = ssikit::parse_axis(axis);
  return req;
}

json layout_json(const ssikit::Layout& l) { return {{"n", l.n_particles()}, {"d", l.local_dim()}}; }

// ---------------------------------------------------------------------------

struct EvaluateArgs {
  std::string state;
  std::vector<std::string> criteria{"opt-ssi"};
  std::string set;
  std::vector<std::string> index_sets;
  bool all_i = false;
  std::string axis = "x";
  std::string out;
};

int run_evaluate(const EvaluateArgs& a, Manifest& manifest, const Globals& g) {
  const auto state = ssikit::make_state(a.state, g.dim_cap, g.tol);
  const auto req = make_request(a.criteria, a.set, a.index_sets, a.all_i, a.axis);
  const auto criteria = ssikit::build_criteria(req, state.rho.layout().local_dim(), g.tol);
  const auto reports = ssikit::evaluate_all(criteria, state.rho);
  json body{{"state", a.state}, {"layout", layout_json(state.rho.layout())}, {"reports", ssikit::reports_to_json(reports)}};
  emit_json(std::move(body), a.out, manifest, g);
  return 0;
}

struct ScanArgs {
  std::string kind;
  std::string state;
  std::string hamiltonian = "sum-Gk2";
  std::size_t n = 0;
  std::size_t d = 0;
  double from = 0.0;
  double to = 1.0;
  std::size_t steps = 11;
  std::vector<std::string> criteria{"eq9"};
  std::string set;
  std::vector<std::string> index_sets;
  bool all_i = false;
  std::string axis = "x";
  std::string csv;
  std::string json_path;
};

int run_scan(const ScanArgs& a, Manifest& manifest, const Globals& g) {
  const auto grid = ssikit::linear_grid(a.from, a.to, a.steps);
  const auto req = make_request(a.criteria, a.set, a.index_sets, a.all_i, a.axis);
  std::vector<ssikit::ScanRow> rows;
  json body{{"kind", a.kind}};
  if (a.kind == "noise") {
    if (a.state.empty()) throw ssikit::InputError("scan noise needs --state");
    const auto base = ssikit::make_state(a.state, g.dim_cap, g.tol);
    body["state"] = a.state;
    body["layout"] = layout_json(base.rho.layout());
    rows = ssikit::noise_scan(base.rho, grid, ssikit::build_criteria(req, base.rho.layout().local_dim(), g.tol), g.tol);
  } else if (a.kind == "thermal") {
    if (a.n == 0 || a.d == 0) throw ssikit::InputError("scan thermal needs --N and --d");
    const ssikit::Layout layout(a.n, a.d, g.dim_cap);
    const auto h = ssikit::build_hamiltonian(ssikit::parse_hamiltonian(a.hamiltonian), layout);
    body["hamiltonian"] = a.hamiltonian;
    body["layout"] = layout_json(layout);
    rows = ssikit::thermal_scan(h, layout, grid, ssikit::build_criteria(req, a.d, g.tol), g.tol);
  } else {
    throw ssikit::InputError("scan kind must be noise or thermal");
  }
  body["rows"] = ssikit::scan_to_json(rows);

  std::string csv = ssikit::scan_to_csv(rows);
  if (!a.csv.empty() && a.csv != "-") manifest.add_output(a.csv);
  if (!a.json_path.empty()) emit_json(body, a.json_path, manifest, g);
  if (!a.csv.empty() || a.json_path.empty()) {
    if (!g.no_manifest) csv = "# manifest " + manifest.to_json().dump() + "\n" + csv;
    write_text(a.csv, csv);
  }
  return 0;
}

struct VerifyArgs {
  std::string set = "spin:1/2";
  std::size_t n = 2;
  std::vector<std::string> criteria{"obs1"};
  std::vector<std::string> index_sets;
  bool all_i = false;
  std::string axis = "x";
  std::string state_class = "product";
  ssikit::OptimizationConfig cfg;
  double alarm = 1e-5;
  std::string out;
};

int run_verify(const VerifyArgs& a, Manifest& manifest, const Globals& g) {
  const auto set = ssikit::parse_observable_set(a.set);
  const ssikit::Layout layout(a.n, set.local_dim, g.dim_cap);
  const bool two = a.state_class == "two-producible";
  if (!two && a.state_class != "product") throw ssikit::InputError("--class must be product or two-producible");
  const auto req = make_request(a.criteria, a.set, a.index_sets, a.all_i, a.axis);
  const auto criteria = ssikit::build_criteria(req, set.local_dim, g.tol);
  manifest.set_seed(a.cfg.seed);

  json results = json::array();
  std::vector<std::string> alarms;
  for (const auto& c : criteria) {
    const auto r = two ? ssikit::minimize_over_two_producible(c, layout, a.cfg)
                       : ssikit::minimize_over_products(c, layout, a.cfg);
    const bool valid = ssikit::is_valid_bound(c, two);
    results.push_back(ssikit::optimization_to_json(c, r, valid));
    if (valid && r.min_margin < -a.alarm) alarms.push_back(c.id);
  }
  json body{{"set", set.name},
            {"layout", layout_json(layout)},
            {"class", a.state_class},
            {"restarts", a.cfg.restarts},
            {"seed", a.cfg.seed},
            {"results", results},
            {"alarm", !alarms.empty()}};
  emit_json(std::move(body), a.out, manifest, g);
  if (!alarms.empty()) {
    std::string msg = "separable bound beaten numerically for:";
    for (const auto& id : alarms) msg += " " + id;
    throw ssikit::CorrectnessAlarm(msg);
  }
  return 0;
}

struct GenStateArgs {
  std::string recipe;
  std::string out;
};

int run_gen_state(const GenStateArgs& a, Manifest& manifest, const Globals& g) {
  const auto state = ssikit::make_state(a.recipe, g.dim_cap, g.tol);
  emit_json(ssikit::state_to_json(state), a.out, manifest, g);
  return 0;
}

struct IdentityArgs {
  std::vector<std::string> dims{"2,3,4"};
  std::vector<std::string> spins{"0.5,1,1.5"};
  bool as_json = false;
  ssikit::IdentityOptions opt;
  std::string out;
};

ssikit::Spin parse_spin(const std::string& s) {
  const auto set = ssikit::parse_observable_set("spin:" + s);
  return ssikit::Spin::from_local_dim(set.local_dim);
}

int run_identities(const IdentityArgs& a, Manifest& manifest, const Globals& g) {
  std::vector<std::size_t> dims;
  for (const auto& s : split_list(a.dims)) {
    const auto v = ssikit::parse_index_list(s);
    dims.insert(dims.end(), v.begin(), v.end());
  }
  std::vector<ssikit::Spin> spins;
  for (const auto& s : split_list(a.spins)) spins.push_back(parse_spin(s));
  manifest.set_seed(a.opt.seed);
  const auto checks = ssikit::run_identities(dims, spins, a.opt);
  bool all = true;
  for (const auto& c : checks) all = all && c.passed;
  if (a.as_json) {
    emit_json({{"checks", ssikit::identities_to_json(checks)}, {"all_passed", all}}, a.out, manifest, g);
  } else {
    std::ostringstream os;
    for (const auto& c : checks) {
      os << (c.passed ? "PASS " : "FAIL ") << c.id << ' ' << c.name << " [" << c.params << "] deviation "
         << c.deviation << " tolerance " << c.tolerance << '\n';
    }
    os << checks.size() << " checks, " << (all ? "all passed" : "FAILURES") << '\n';
    write_text(a.out, os.str());
  }
  if (!all) throw ssikit::CorrectnessAlarm("identity check failed");
  return 0;
}

void add_criteria_options(CLI::App* sub, std::vector<std::string>& criteria, std::string& set,
                          std::vector<std::string>& index_sets, bool& all_i, std::string& axis) {
  sub->add_option("--criteria", criteria,
                  "Comma-separated ids: eq1 eq5a eq5b eq5c[:x|y|z] eq5d[:x|y|z] eq7 eq9 eq10 eq11 obs1 opt-ssi")
      ->capture_default_str();
  sub->add_option("--set", set, "Operator set: spin:<j>, gellmann:<d>, loo:<d>, loo2:<d>");
  sub->add_option("--I", index_sets, "Index set for obs1/eq11, e.g. 0,2 (repeatable)");
  sub->add_flag("--all-I", all_i, "All index sets (spin sets) or the canonical family (larger sets)");
  sub->add_option("--axis", axis, "Squeezed axis for eq1/eq7")->check(CLI::IsMember({"x", "y", "z"}))->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spin-squeezing and generalized separability inequalities"};
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON file with option values (nested objects for subcommands)");
  app.require_subcommand(1);

  Globals g;
  app.add_flag("--no-manifest", g.no_manifest, "Omit the run manifest (for byte-wise comparison)")
      ->envname("SSIKIT_NO_MANIFEST");
  app.add_option("--dim-cap", g.dim_cap, "Largest total Hilbert-space dimension")
      ->envname("SSIKIT_DIM_CAP")->capture_default_str();
  app.add_option("--tol-violate", g.tol.violate)->envname("SSIKIT_TOL_VIOLATE")->capture_default_str();
  app.add_option("--tol-herm", g.tol.herm)->envname("SSIKIT_TOL_HERM")->capture_default_str();
  app.add_option("--tol-psd", g.tol.psd)->envname("SSIKIT_TOL_PSD")->capture_default_str();
  app.add_option("--tol-trace", g.tol.trace)->envname("SSIKIT_TOL_TRACE")->capture_default_str();
  app.add_option("--tol-denominator", g.tol.denominator)->envname("SSIKIT_TOL_DENOMINATOR")->capture_default_str();
  app.add_option("--tol-singlet", g.tol.singlet)->envname("SSIKIT_TOL_SINGLET")->capture_default_str();

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Evaluate criteria on one state");
  evaluate->add_option("--state", ev.state, "Recipe (e.g. dicke:N=4,j=0.5) or file:path")->required();
  add_criteria_options(evaluate, ev.criteria, ev.set, ev.index_sets, ev.all_i, ev.axis);
  evaluate->add_option("-o,--output", ev.out, "Report path (default stdout)");

  ScanArgs sc;
  auto* scan = app.add_subcommand("scan", "Noise or thermal parameter scan with PPT classification");
  scan->add_option("kind", sc.kind, "noise or thermal")->required()->check(CLI::IsMember({"noise", "thermal"}));
  scan->add_option("--state", sc.state, "Base state recipe (noise scans)");
  scan->add_option("--H", sc.hamiltonian, "sum-Gk2 or sum-J2 (thermal scans)")->capture_default_str();
  scan->add_option("--N", sc.n, "Particles (thermal scans)");
  scan->add_option("--d", sc.d, "Local dimension (thermal scans)");
  scan->add_option("--from", sc.from)->capture_default_str();
  scan->add_option("--to", sc.to)->capture_default_str();
  scan->add_option("--steps", sc.steps)->capture_default_str();
  add_criteria_options(scan, sc.criteria, sc.set, sc.index_sets, sc.all_i, sc.axis);
  scan->add_option("--csv", sc.csv, "CSV path ('-' for stdout; default when --json is absent)");
  scan->add_option("--json", sc.json_path, "JSON path");

  VerifyArgs vb;
  auto* verify = app.add_subcommand("verify-bounds", "Minimize criterion margins over product or two-producible states");
  verify->add_option("--N", vb.n)->capture_default_str();
  add_criteria_options(verify, vb.criteria, vb.set, vb.index_sets, vb.all_i, vb.axis);
  verify->get_option("--set")->capture_default_str();
  verify->add_option("--class", vb.state_class)->check(CLI::IsMember({"product", "two-producible"}))->capture_default_str();
  verify->add_option("--restarts", vb.cfg.restarts)->envname("SSIKIT_RESTARTS")->capture_default_str();
  verify->add_option("--seed", vb.cfg.seed)->envname("SSIKIT_SEED")->capture_default_str();
  verify->add_option("--max-sweeps", vb.cfg.max_sweeps)->envname("SSIKIT_MAX_SWEEPS")->capture_default_str();
  verify->add_option("--alarm", vb.alarm, "Margins below -alarm on a valid bound exit with code 4")
      ->capture_default_str();
  verify->add_option("-o,--output", vb.out);

  GenStateArgs gs;
  auto* gen = app.add_subcommand("gen-state", "Write a state file from a recipe");
  gen->add_option("recipe", gs.recipe)->required();
  gen->add_option("-o,--output", gs.out);

  IdentityArgs ia;
  auto* ids = app.add_subcommand("identities", "Run the operator identity battery");
  ids->add_option("--d", ia.dims, "Local dimensions, comma separated")->capture_default_str();
  ids->add_option("--j", ia.spins, "Spins, comma separated (0.5 or 1/2 style)")->capture_default_str();
  ids->add_flag("--json", ia.as_json);
  ids->add_option("--samples", ia.opt.samples)->capture_default_str();
  ids->add_option("--seed", ia.opt.seed)->envname("SSIKIT_SEED")->capture_default_str();
  ids->add_option("-o,--output", ia.out);

  for (auto* sub : {evaluate, scan, verify, gen, ids}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    Manifest manifest(*sub, g);
    if (sub == evaluate) return run_evaluate(ev, manifest, g);
    if (sub == scan) return run_scan(sc, manifest, g);
    if (sub == verify) return run_verify(vb, manifest, g);
    if (sub == gen) return run_gen_state(gs, manifest, g);
    return run_identities(ia, manifest, g);
  } catch (const ssikit::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const ssikit::StateError& e) {
    std::cerr << "state error: " << e.what() << '\n';
    return kExitState;
  } catch (const ssikit::CorrectnessAlarm& e) {
    std::cerr << "correctness alarm: " << e.what() << '\n';
    return kExitAlarm;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
}
