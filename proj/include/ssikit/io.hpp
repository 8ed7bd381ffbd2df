#pragma once

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ssikit/identities.hpp"
#include "ssikit/lab.hpp"

namespace ssikit {

using json = nlohmann::json;

inline constexpr const char* kToolVersion = "0.1.0";

// ---------------------------------------------------------------------------
// State files: {"layout":{"n":N,"d":d}, "kind":"pure"|"mixed", "data":[[re,im],...]}
// Mixed states are flattened row-major. Unknown keys (e.g. "manifest") are ignored.
// ---------------------------------------------------------------------------

/// A loaded or generated state. `pure` is kept when the source was a vector
/// so that gen-state can write it back without squaring the dimension.
struct StateBundle {
  DensityMatrix rho;
  std::optional<PureState> pure;
  std::string source;

  explicit StateBundle(DensityMatrix r, std::string src = {}) : rho(std::move(r)), source(std::move(src)) {}
  explicit StateBundle(const PureState& p, std::string src = {})
      : rho(p), pure(p), source(std::move(src)) {}
};

inline json complex_array(const cplx* data, std::size_t count) {
  json arr = json::array();
  for (std::size_t i = 0; i < count; ++i) arr.push_back({data[i].real(), data[i].imag()});
  return arr;
}

inline json state_to_json(const PureState& psi) {
  const Vector& v = psi.amplitudes();
  return {{"layout", {{"n", psi.layout().n_particles()}, {"d", psi.layout().local_dim()}}},
          {"kind", "pure"},
          {"data", complex_array(v.data(), static_cast<std::size_t>(v.size()))}};
}

inline json state_to_json(const DensityMatrix& rho) {
  // Eigen is column-major; the file format is row-major.
  const Matrix row_major = rho.matrix().transpose();
  return {{"layout", {{"n", rho.layout().n_particles()}, {"d", rho.layout().local_dim()}}},
          {"kind", "mixed"},
          {"data", complex_array(row_major.data(), static_cast<std::size_t>(row_major.size()))}};
}

inline json state_to_json(const StateBundle& s) {
  return s.pure ? state_to_json(*s.pure) : state_to_json(s.rho);
}

inline StateBundle state_from_json(const json& j, std::size_t cap = kDefaultDimCap, const Tolerances& tol = {}) {
  std::size_t n = 0, d = 0;
  std::string kind;
  std::vector<cplx> data;
  try {
    n = j.at("layout").at("n").get<std::size_t>();
    d = j.at("layout").at("d").get<std::size_t>();
    kind = j.at("kind").get<std::string>();
    for (const auto& e : j.at("data")) {
      if (!e.is_array() || e.size() != 2) throw InputError("state data entries must be [re, im] pairs");
      data.emplace_back(e[0].get<double>(), e[1].get<double>());
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed state file: ") + e.what());
  }
  Layout layout(n, d, cap);
  const auto dim = static_cast<Eigen::Index>(layout.dim());
  if (kind == "pure") {
    if (data.size() != layout.dim()) throw InputError("pure state data length does not match d^N");
    Vector v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v(i) = data[static_cast<std::size_t>(i)];
    return StateBundle(PureState(layout, v, tol));
  }
  if (kind == "mixed") {
    if (data.size() != layout.dim() * layout.dim()) throw InputError("mixed state data length does not match D^2");
    Matrix m(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
      for (Eigen::Index c = 0; c < dim; ++c) m(r, c) = data[static_cast<std::size_t>(r * dim + c)];
    }
    return StateBundle(DensityMatrix(layout, m, tol));
  }
  throw InputError("state kind must be \"pure\" or \"mixed\", got \"" + kind + "\"");
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("cannot parse " + path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Recipes: "kind:key=value,key=value" or "file:path".
// ---------------------------------------------------------------------------

namespace detail {

inline std::size_t parse_unsigned(const std::string& text, const std::string& what) {
  std::size_t v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || end != text.data() + text.size()) {
    throw InputError(what + " '" + text + "' is not a non-negative integer");
  }
  return v;
}

}  // namespace detail

struct Recipe {
  std::string kind;
  std::map<std::string, std::string> params;
  std::string path;  ///< only for file:

  bool has(const std::string& key) const { return params.count(key) != 0; }

  std::string text(const std::string& key, const std::string& fallback) const {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  }

  double real(const std::string& key, std::optional<double> fallback = std::nullopt) const {
    auto it = params.find(key);
    if (it == params.end()) {
      if (fallback) return *fallback;
      throw InputError("recipe '" + kind + "' needs " + key + "=");
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(it->second, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != it->second.size()) throw InputError("recipe value " + key + "=" + it->second + " is not a number");
    return v;
  }

  std::size_t count(const std::string& key, std::optional<std::size_t> fallback = std::nullopt) const {
    if (!has(key) && fallback) return *fallback;
    const double v = real(key);
    if (!(v >= 0.0) || v != std::floor(v) || v > 1e9) {
      throw InputError("recipe value " + key + " must be a non-negative integer");
    }
    return static_cast<std::size_t>(v);
  }

  Spin spin(std::optional<std::size_t> local_dim_fallback = std::nullopt) const {
    if (has("j")) {
      const std::string s = params.at("j");
      const auto slash = s.find('/');
      if (slash != std::string::npos) {
        if (s.substr(slash + 1) != "2") throw InputError("spin fraction must be over 2");
        return Spin(static_cast<int>(detail::parse_unsigned(s.substr(0, slash), "spin numerator")));
      }
      return Spin::from_value(real("j"));
    }
    if (has("d")) return Spin::from_local_dim(count("d"));
    if (local_dim_fallback) return Spin::from_local_dim(*local_dim_fallback);
    throw InputError("recipe '" + kind + "' needs j= or d=");
  }
};

inline Recipe parse_recipe(const std::string& text) {
  Recipe r;
  const auto colon = text.find(':');
  r.kind = text.substr(0, colon);
  if (r.kind.empty()) throw InputError("empty state recipe");
  if (colon == std::string::npos) return r;
  const std::string rest = text.substr(colon + 1);
  if (r.kind == "file") {
    r.path = rest;
    if (r.path.empty()) throw InputError("file: recipe needs a path");
    return r;
  }
  std::stringstream ss(rest);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw InputError("recipe entry '" + item + "' must be key=value");
    r.params[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return r;
}

namespace detail {

inline std::array<double, 3> parse_direction(const Recipe& r) {
  const std::string axis = r.text("axis", "");
  if (axis == "x") return {1, 0, 0};
  if (axis == "y") return {0, 1, 0};
  if (axis == "z" || (axis.empty() && !r.has("theta"))) return {0, 0, 1};
  if (!axis.empty()) throw InputError("coherent axis must be x, y or z");
  const double theta = r.real("theta");
  const double phi = r.real("phi", 0.0);
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

}  // namespace detail

/// Builds the state described by a recipe string. Recognized kinds:
///   dicke:N=,j=            coherent:N=,j=,axis=x|y|z (or theta=,phi=)
///   singlet:N=,d=          spin-singlet:N=,j=
///   noisy-singlet:p=[,N=,d=]  (SU(d) singlet; d defaults to 2, N to d)
///   product:N=,d=,levels=i.j.k  mixed:N=,d=
///   thermal:H=sum-Gk2|sum-J2,N=,d=,T=
///   random-pure / random-density / random-product:N=,d=,seed=
///   file:path
inline StateBundle make_state(const std::string& text, std::size_t cap = kDefaultDimCap, const Tolerances& tol = {}) {
  const Recipe r = parse_recipe(text);
  const std::string& k = r.kind;
  if (k == "file") return state_from_json(read_json_file(r.path), cap, tol);
  if (k == "dicke") return StateBundle(dicke_state(r.count("N"), r.spin(), cap), text);
  if (k == "coherent") {
    return StateBundle(coherent_spin_state(r.spin(), detail::parse_direction(r), r.count("N"), cap), text);
  }
  if (k == "singlet") {
    const std::size_t d = r.count("d", 2);
    return StateBundle(sud_singlet(r.count("N", d), d, tol, cap), text);
  }
  if (k == "spin-singlet") {
    const Spin s = r.spin(2);
    return StateBundle(spin_singlet(r.count("N", 2), s, tol, cap), text);
  }
  if (k == "noisy-singlet") {
    const std::size_t d = r.count("d", 2);
    return StateBundle(white_noise_mix(sud_singlet(r.count("N", d), d, tol, cap), r.real("p")), text);
  }
  if (k == "noisy-spin-singlet") {
    const Spin s = r.spin(2);
    return StateBundle(white_noise_mix(spin_singlet(r.count("N", 2), s, tol, cap), r.real("p")), text);
  }
  if (k == "product") {
    const std::size_t n = r.count("N");
    const std::size_t d = r.count("d");
    std::vector<std::size_t> levels(n, 0);
    if (r.has("levels")) {
      std::stringstream ss(r.text("levels", ""));
      std::string item;
      levels.clear();
      while (std::getline(ss, item, '.')) levels.push_back(detail::parse_unsigned(item, "product level"));
      if (levels.size() != n) throw InputError("product levels must list one level per particle, separated by '.'");
    }
    std::vector<Vector> locals;
    for (const std::size_t lv : levels) {
      if (lv >= d) throw InputError("product level out of range");
      locals.push_back(Vector::Unit(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(lv)));
    }
    return StateBundle(product_state(locals, cap), text);
  }
  if (k == "mixed") return StateBundle(maximally_mixed(Layout(r.count("N"), r.count("d"), cap)), text);
  if (k == "thermal") {
    Layout layout(r.count("N"), r.count("d"), cap);
    const auto h = build_hamiltonian(parse_hamiltonian(r.text("H", "sum-Gk2")), layout);
    return StateBundle(thermal_state(h, layout, r.real("T")), text);
  }
  if (k == "random-pure" || k == "random-density" || k == "random-product") {
    Layout layout(r.count("N"), r.count("d"), cap);
    const std::uint64_t seed = r.count("seed", 0);
    if (k == "random-pure") return StateBundle(random_pure(layout, seed), text);
    if (k == "random-density") return StateBundle(random_density(layout, seed), text);
    return StateBundle(random_product(layout, seed), text);
  }
  throw InputError("unknown state recipe kind '" + k + "'");
}

// ---------------------------------------------------------------------------
// Criterion selection by id, as used on the command line.
// ---------------------------------------------------------------------------

struct CriteriaRequest {
  std::vector<std::string> ids;   ///< eq1 eq5a eq5b eq5c[:axis] eq5d[:axis] eq7 eq9 eq10 eq11 obs1 opt-ssi
  std::string set_name;           ///< empty: spin set matching d for spin criteria, gellmann:d otherwise
  std::vector<std::vector<std::size_t>> index_sets;  ///< for obs1 / eq11; empty means the full set
  bool all_index_sets = false;
  Axis squeezed = Axis::x;        ///< eq1 / eq7
};

namespace detail {

inline Spin spin_for(const CriteriaRequest& req, std::size_t d) {
  if (!req.set_name.empty() && parse_observable_set(req.set_name).local_dim != d) {
    throw InputError("operator set " + req.set_name + " does not match d = " + std::to_string(d));
  }
  return Spin::from_local_dim(d);
}

inline ObservableSet set_for(const CriteriaRequest& req, std::size_t d) {
  ObservableSet set = req.set_name.empty() ? gellmann_set(d) : parse_observable_set(req.set_name);
  if (set.local_dim != d) throw InputError("operator set " + set.name + " does not match d = " + std::to_string(d));
  return set;
}

inline std::vector<std::vector<std::size_t>> index_sets_for(const CriteriaRequest& req, const ObservableSet& set) {
  if (req.all_index_sets) {
    // Spin sets are small enough to enumerate; larger sets use the canonical family.
    return set.size() <= 3 ? all_index_sets(set.size()) : canonical_index_sets(set.size());
  }
  if (!req.index_sets.empty()) return req.index_sets;
  std::vector<std::size_t> all(set.size());
  std::iota(all.begin(), all.end(), 0);
  return {all};
}

}  // namespace detail

/// Expands a request into concrete criteria for local dimension d.
inline std::vector<Criterion> build_criteria(const CriteriaRequest& req, std::size_t d, const Tolerances& tol = {}) {
  std::vector<Criterion> out;
  for (const auto& raw : req.ids) {
    const auto colon = raw.find(':');
    const std::string id = raw.substr(0, colon);
    const std::string axis = colon == std::string::npos ? "" : raw.substr(colon + 1);
    const bool spin_like = id == "eq1" || id == "eq5a" || id == "eq5b" || id == "eq5c" || id == "eq5d" ||
                           id == "eq7" || id == "opt-ssi";
    if (spin_like && !req.set_name.empty() && req.set_name.rfind("spin:", 0) != 0) {
      throw InputError(id + " needs a spin operator set, got " + req.set_name);
    }
    const Spin spin = spin_like ? detail::spin_for(req, d) : Spin(1);
    if (id == "opt-ssi") {
      auto v = optimal_ssi_criteria(spin, tol);
      out.insert(out.end(), v.begin(), v.end());
    } else if (id == "eq5a") {
      out.push_back(total_spin_criterion(spin, tol));
    } else if (id == "eq5b") {
      out.push_back(spin_variance_criterion(spin, tol));
    } else if (id == "eq5c" || id == "eq5d") {
      std::vector<Axis> axes = axis.empty() ? std::vector<Axis>{Axis::x, Axis::y, Axis::z}
                                            : std::vector<Axis>{parse_axis(axis)};
      for (const Axis a : axes) {
        out.push_back(id == "eq5c" ? single_axis_squeezing_criterion(spin, a, tol)
                                   : two_axis_squeezing_criterion(spin, a, tol));
      }
    } else if (id == "eq1" || id == "eq7") {
      const SsiAxes axes{axis.empty() ? req.squeezed : parse_axis(axis)};
      out.push_back(id == "eq1" ? standard_ssi_criterion(spin, axes, tol) : mapped_ssi_criterion(spin, axes, tol));
    } else if (id == "eq9" || id == "eq10") {
      const auto set = detail::set_for(req, d);
      out.push_back(id == "eq9" ? sud_singlet_criterion(set, tol) : two_producible_criterion(set, tol));
    } else if (id == "obs1" || id == "eq11") {
      const auto set = detail::set_for(req, d);
      for (const auto& s : detail::index_sets_for(req, set)) {
        out.push_back(id == "obs1" ? general_ssi_criterion(set, s, tol) : symmetric_criterion(set, s, tol));
      }
    } else {
      throw InputError("unknown criterion '" + raw + "'");
    }
  }
  return out;
}

/// Whether the criterion is a valid lower bound on the given state class, so
/// that a numerical minimum below it signals a bug. eq1 is not a separable
/// bound for j > 1/2 and eq11 only holds for symmetric states.
inline bool is_valid_bound(const Criterion& c, bool two_producible) {
  if (two_producible) return c.id == "eq10";
  if (c.id == "eq11") return false;
  if (c.id == "eq1") return c.set.local_dim == 2;
  return true;
}

/// "0,2" -> {0, 2}; "" -> {}.
inline std::vector<std::size_t> parse_index_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(detail::parse_unsigned(item, "index"));
  }
  return out;
}

/// Evaluates every criterion on one state. eq11 on a state that is not
/// permutation symmetric is reported as inapplicable instead of failing.
inline std::vector<CriterionReport> evaluate_all(const std::vector<Criterion>& criteria, const DensityMatrix& rho) {
  std::map<std::string, MomentTable> tables;
  std::optional<bool> symmetric;
  std::vector<CriterionReport> out;
  for (const auto& c : criteria) {
    if (c.set.local_dim != rho.layout().local_dim()) throw InputError("criterion set does not match state");
    auto it = tables.find(c.set.name);
    if (it == tables.end()) it = tables.emplace(c.set.name, moment_table(rho, collectivize(c.set, rho.layout()))).first;
    auto r = c.evaluate(it->second);
    if (c.id == "eq11") {
      if (!symmetric) symmetric = is_permutation_symmetric(rho);
      if (!*symmetric) {
        r.status = ReportStatus::inapplicable;
        r.violated = false;
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Report serialization.
// ---------------------------------------------------------------------------

inline const char* status_name(ReportStatus s) { return s == ReportStatus::ok ? "ok" : "inapplicable"; }

inline json report_to_json(const CriterionReport& r) {
  return {{"criterion", r.criterion}, {"I", r.index_set}, {"lhs", r.lhs},           {"rhs", r.rhs},
          {"margin", r.margin},       {"violated", r.violated}, {"status", status_name(r.status)}};
}

inline json reports_to_json(const std::vector<CriterionReport>& reports) {
  json arr = json::array();
  for (const auto& r : reports) arr.push_back(report_to_json(r));
  return arr;
}

inline json scan_to_json(const std::vector<ScanRow>& rows) {
  json arr = json::array();
  for (const auto& row : rows) {
    json cuts = json::array();
    for (std::size_t i = 0; i < row.cuts.size(); ++i) {
      cuts.push_back({{"transposed", row.cuts[i]}, {"min_eig", row.min_t1[i]}});
    }
    arr.push_back({{"param", row.param},
                   {"classification", classification_name(row.classification)},
                   {"min_t1", row.min_t1_overall()},
                   {"cuts", cuts},
                   {"reports", reports_to_json(row.reports)}});
  }
  return arr;
}

inline std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

/// Columns: param,criterion,margin,min_t1,classification (one line per report).
inline std::string scan_to_csv(const std::vector<ScanRow>& rows) {
  std::ostringstream os;
  os << "param,criterion,margin,min_t1,classification\n";
  for (const auto& row : rows) {
    for (const auto& r : row.reports) {
      std::string name = r.criterion;
      if (!r.index_set.empty() && (r.criterion == "obs1" || r.criterion == "eq11")) {
        name += "[";
        for (std::size_t i = 0; i < r.index_set.size(); ++i) name += (i ? " " : "") + std::to_string(r.index_set[i]);
        name += "]";
      }
      os << format_double(row.param) << ',' << name << ',' << format_double(r.margin) << ','
         << format_double(row.min_t1_overall()) << ',' << classification_name(row.classification) << '\n';
    }
  }
  return os.str();
}

inline json optimization_to_json(const Criterion& c, const OptimizationResult& r, bool bound_valid) {
  return {{"criterion", c.id},          {"I", c.index_set},
          {"set", c.set.name},          {"min_margin", r.min_margin},
          {"best_restart", r.best_restart}, {"restarts_run", r.restarts_run},
          {"sweeps", r.sweeps},         {"converged", r.converged},
          {"structure", r.structure},   {"bound_valid", bound_valid}};
}

inline json identities_to_json(const std::vector<IdentityCheck>& checks) {
  json arr = json::array();
  for (const auto& c : checks) {
    arr.push_back({{"id", c.id},
                   {"name", c.name},
                   {"params", c.params},
                   {"description", c.description},
                   {"deviation", c.deviation},
                   {"tolerance", c.tolerance},
                   {"passed", c.passed}});
  }
  return arr;
}

}  // namespace ssikit
