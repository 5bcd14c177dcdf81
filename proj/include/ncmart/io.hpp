#pragma once
//
// JSON interchange (instances, spaces, suite configs, reports) and
// RFC-4180 CSV exports. Non-finite numbers are written as the strings
// "inf" / "-inf"; complex entries as [re, im]. Config readers reject
// unknown keys.
//

#include <cmath>
#include <cstdio>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ncmart/algebra.hpp"
#include "ncmart/jones.hpp"
#include "ncmart/random.hpp"
#include "ncmart/rearrangement.hpp"
#include "ncmart/symspaces.hpp"
#include "ncmart/verify.hpp"

namespace ncmart::io {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Scalars

inline json num(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline double to_num(const json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "inf" || s == "Infinity") return inf;
    if (s == "-inf" || s == "-Infinity") return -inf;
  }
  if (j.is_null()) return no_constant;
  throw std::invalid_argument(where + ": expected a number");
}

inline std::vector<double> to_nums(const json& j, const std::string& where) {
  if (!j.is_array()) throw std::invalid_argument(where + ": expected an array");
  std::vector<double> v;
  for (const auto& e : j) v.push_back(to_num(e, where));
  return v;
}

inline void require_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw std::invalid_argument(where + ": expected an object");
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) throw std::invalid_argument(where + ": unknown key '" + k + "'");
  }
}

inline const json& need(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw std::invalid_argument(where + ": missing key '" + std::string(key) + "'");
  return j.at(key);
}

// ---------------------------------------------------------------------------
// Algebra, filtration, operators, instances

inline json to_json(const TracialAlgebra& A) {
  json blocks = json::array();
  for (const auto& b : A.blocks()) blocks.push_back({b.dim, b.weight});
  return blocks;
}

inline TracialAlgebra algebra_from_json(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("blocks: expected [[dim, weight], …]");
  std::vector<Block> blocks;
  for (const auto& b : j) {
    if (!b.is_array() || b.size() != 2) throw std::invalid_argument("blocks: each entry must be [dim, weight]");
    blocks.push_back({b[0].get<int>(), to_num(b[1], "blocks")});
  }
  return TracialAlgebra(std::move(blocks));
}

inline json to_json(const Filtration& F) {
  json j{{"kind", ncmart::to_string(F.kind())}};
  if (F.kind() == FiltrationKind::tensor) j["dims"] = F.tensor_dims();
  else j["partitions"] = F.partitions();
  if (F.allow_truncated()) j["allow_truncated"] = true;
  return j;
}

inline Filtration filtration_from_json(TracialAlgebra A, const json& j) {
  require_keys(j, {"kind", "partitions", "dims", "allow_truncated"}, "filtration");
  const std::string kind = need(j, "kind", "filtration").get<std::string>();
  const bool trunc = j.value("allow_truncated", false);
  using Parts = std::vector<std::vector<std::vector<int>>>;
  if (kind == "pinching") return Filtration::pinching(std::move(A), need(j, "partitions", "filtration").get<Parts>(), trunc);
  if (kind == "averaging")
    return Filtration::averaging(std::move(A), need(j, "partitions", "filtration").get<Parts>(), trunc);
  if (kind == "tensor") return Filtration::tensor(std::move(A), need(j, "dims", "filtration").get<std::vector<int>>());
  throw std::invalid_argument("filtration: unknown kind '" + kind + "'");
}

/// Blocks as row-major [[[re, im], …], …].
inline json to_json(const Operator& x) {
  json blocks = json::array();
  for (const auto& m : x.blocks()) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back({m(i, k).real(), m(i, k).imag()});
      rows.push_back(std::move(row));
    }
    blocks.push_back(std::move(rows));
  }
  return blocks;
}

inline Operator operator_from_json(const TracialAlgebra& A, const json& j) {
  if (!j.is_array() || j.size() != A.num_blocks()) throw std::invalid_argument("operator: block count mismatch");
  Operator x = Operator::zero(A);
  for (std::size_t b = 0; b < A.num_blocks(); ++b) {
    const int d = A.block_dim(b);
    const json& rows = j[b];
    if (!rows.is_array() || static_cast<int>(rows.size()) != d) throw std::invalid_argument("operator: bad block shape");
    for (int i = 0; i < d; ++i) {
      const json& row = rows[static_cast<std::size_t>(i)];
      if (!row.is_array() || static_cast<int>(row.size()) != d) throw std::invalid_argument("operator: bad block shape");
      for (int k = 0; k < d; ++k) {
        const json& e = row[static_cast<std::size_t>(k)];
        if (e.is_array() && e.size() == 2) x.block(b)(i, k) = cplx(to_num(e[0], "operator"), to_num(e[1], "operator"));
        else if (e.is_number()) x.block(b)(i, k) = e.get<double>();
        else throw std::invalid_argument("operator: entries must be [re, im]");
      }
    }
  }
  return x;
}

inline json to_json(const Instance& inst) {
  return {{"seed", inst.spec.seed},
          {"dim", inst.spec.dim},
          {"levels", inst.spec.levels},
          {"mode", ncmart::to_string(inst.spec.mode)},
          {"blocks", to_json(inst.F.algebra())},
          {"filtration", to_json(inst.F)},
          {"x", to_json(inst.x)}};
}

inline Instance instance_from_json(const json& j) {
  require_keys(j, {"seed", "dim", "levels", "mode", "blocks", "filtration", "x"}, "instance");
  TracialAlgebra A = algebra_from_json(need(j, "blocks", "instance"));
  Filtration F = filtration_from_json(A, need(j, "filtration", "instance"));
  Operator x = operator_from_json(F.algebra(), need(j, "x", "instance"));
  InstanceSpec s;
  s.seed = j.value("seed", std::uint64_t{0});
  s.dim = j.value("dim", F.algebra().total_dim());
  s.levels = j.value("levels", F.levels());
  s.mode = parse_mode(j.value("mode", std::string(F.kind() == FiltrationKind::averaging ? "dyadic" : "noncommutative")));
  if (s.dim != F.algebra().total_dim() || s.levels != F.levels())
    throw std::invalid_argument("instance: dim/levels disagree with the filtration");
  return {s, std::move(F), std::move(x)};
}

// ---------------------------------------------------------------------------
// Step functions and spaces

inline json to_json(const StepFunction& f) {
  json j = json::array();
  for (const auto& s : f.steps()) j.push_back({s.value, s.length});
  return j;
}

inline StepFunction step_from_json(const json& j) {
  std::vector<std::pair<double, double>> pairs;
  if (!j.is_array()) throw std::invalid_argument("step function: expected [[value, length], …]");
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2) throw std::invalid_argument("step function: entries must be [value, length]");
    pairs.emplace_back(to_num(e[0], "step"), to_num(e[1], "step"));
  }
  return StepFunction::from_pairs(std::move(pairs));
}

inline json to_json(const OrliczFunction& phi) {
  json j;
  switch (phi.family) {
    case OrliczFamily::power: j = {{"family", "power"}, {"p", phi.p}}; break;
    case OrliczFamily::two_power: j = {{"family", "two_power"}, {"p", phi.p}, {"q", phi.q}}; break;
    case OrliczFamily::x_log: j = {{"family", "x_log"}}; break;
  }
  if (phi.scale != 1.0) j["scale"] = phi.scale;
  return j;
}

inline OrliczFunction orlicz_from_json(const json& j) {
  require_keys(j, {"family", "p", "q", "scale"}, "orlicz");
  const std::string fam = need(j, "family", "orlicz").get<std::string>();
  OrliczFunction phi;
  if (fam == "power") phi = OrliczFunction::power(to_num(need(j, "p", "orlicz"), "orlicz.p"));
  else if (fam == "two_power")
    phi = OrliczFunction::two_power(to_num(need(j, "p", "orlicz"), "orlicz.p"), to_num(need(j, "q", "orlicz"), "orlicz.q"));
  else if (fam == "x_log") phi = OrliczFunction::x_log();
  else throw std::invalid_argument("orlicz: unknown family '" + fam + "'");
  if (j.contains("scale")) phi.scale = to_num(j["scale"], "orlicz.scale");
  return phi;
}

inline json to_json(const WeightFunction& w) {
  const auto& pcs = w.f.pieces();
  if (pcs.size() == 1 && pcs[0].lo == 0.0 && std::isinf(pcs[0].hi) && pcs[0].c == 1.0) return {{"power", pcs[0].e}};
  json pieces = json::array();
  for (const auto& p : pcs) pieces.push_back({{"lo", num(p.lo)}, {"hi", num(p.hi)}, {"c", p.c}, {"e", p.e}});
  return {{"pieces", pieces}, {"a1", w.a1}, {"a2", w.a2}};
}

inline WeightFunction weight_from_json(const json& j) {
  require_keys(j, {"power", "pieces", "t", "v", "a1", "a2"}, "weight");
  if (j.contains("power")) return WeightFunction::power(to_num(j["power"], "weight.power"));
  const double a1 = to_num(need(j, "a1", "weight"), "weight.a1"), a2 = to_num(need(j, "a2", "weight"), "weight.a2");
  if (j.contains("t"))
    return WeightFunction::sampled(to_nums(j["t"], "weight.t"), to_nums(need(j, "v", "weight"), "weight.v"), a1, a2);
  std::vector<PowerPiece> pieces;
  for (const auto& p : need(j, "pieces", "weight")) {
    require_keys(p, {"lo", "hi", "c", "e"}, "weight.pieces");
    pieces.push_back({to_num(p.at("lo"), "lo"), to_num(p.at("hi"), "hi"), to_num(p.at("c"), "c"), to_num(p.at("e"), "e")});
  }
  return {PiecewisePower(std::move(pieces)), a1, a2};
}

inline json to_json(const SpaceSpec& spec) {
  return std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Lp>) return {{"type", "Lp"}, {"p", num(s.p)}};
        else if constexpr (std::is_same_v<T, Lorentz>) return {{"type", "Lorentz"}, {"p", num(s.p)}, {"q", num(s.q)}};
        else if constexpr (std::is_same_v<T, Orlicz>) return {{"type", "Orlicz"}, {"phi", to_json(s.phi)}};
        else if constexpr (std::is_same_v<T, OrliczLorentz>)
          return {{"type", "OrliczLorentz"}, {"phi", to_json(s.phi)}, {"r", num(s.r)}};
        else return {{"type", "GenLorentz"}, {"phi", to_json(s.phi)}, {"r", num(s.r)}};
      },
      spec);
}

inline SpaceSpec parse_space(const std::string& s);

/// Accepts the object form or the compact string form of parse_space.
inline SpaceSpec space_from_json(const json& j) {
  if (j.is_string()) return parse_space(j.get<std::string>());
  require_keys(j, {"type", "p", "q", "r", "phi"}, "space");
  const std::string t = need(j, "type", "space").get<std::string>();
  SpaceSpec out;
  if (t == "Lp") out = Lp{to_num(need(j, "p", "space"), "space.p")};
  else if (t == "Lorentz") out = Lorentz{to_num(need(j, "p", "space"), "space.p"), to_num(need(j, "q", "space"), "space.q")};
  else if (t == "Orlicz") out = Orlicz{orlicz_from_json(need(j, "phi", "space"))};
  else if (t == "OrliczLorentz")
    out = OrliczLorentz{orlicz_from_json(need(j, "phi", "space")), to_num(need(j, "r", "space"), "space.r")};
  else if (t == "GenLorentz")
    out = GenLorentz{weight_from_json(need(j, "phi", "space")), to_num(need(j, "r", "space"), "space.r")};
  else throw std::invalid_argument("space: unknown type '" + t + "'");
  validate(out);
  return out;
}

namespace detail {

inline double parse_double(const std::string& s) {
  if (s == "inf") return inf;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("space: bad number '" + s + "'");
  }
  if (used != s.size()) throw std::invalid_argument("space: bad number '" + s + "'");
  return v;
}

inline std::vector<std::string> split_args(const std::string& s, const std::string& head) {
  if (s.size() < head.size() + 2 || s.compare(0, head.size() + 1, head + "(") != 0 || s.back() != ')')
    throw std::invalid_argument("space: malformed '" + s + "'");
  std::vector<std::string> out;
  std::stringstream ss(s.substr(head.size() + 1, s.size() - head.size() - 2));
  for (std::string part; std::getline(ss, part, ',');) out.push_back(part);
  return out;
}

inline OrliczFunction parse_orlicz(const std::vector<std::string>& a, std::size_t from) {
  if (a.size() <= from) throw std::invalid_argument("space: missing Orlicz family");
  const std::string& fam = a[from];
  if (fam == "power" && a.size() == from + 2) return OrliczFunction::power(parse_double(a[from + 1]));
  if (fam == "two_power" && a.size() == from + 3)
    return OrliczFunction::two_power(parse_double(a[from + 1]), parse_double(a[from + 2]));
  if (fam == "x_log" && a.size() == from + 1) return OrliczFunction::x_log();
  throw std::invalid_argument("space: bad Orlicz function");
}

}  // namespace detail

/// Compact forms: L<p> (L1, L1.5, Linf), Lorentz(p,q), Orlicz(power,p),
/// Orlicz(two_power,p,q), Orlicz(x_log), OrliczLorentz(r,<orlicz args>),
/// GenLorentz(a,r) with φ = t^a.
inline SpaceSpec parse_space(const std::string& s) {
  SpaceSpec out;
  if (s.rfind("Lorentz(", 0) == 0) {
    auto a = detail::split_args(s, "Lorentz");
    if (a.size() != 2) throw std::invalid_argument("space: Lorentz(p,q)");
    out = Lorentz{detail::parse_double(a[0]), detail::parse_double(a[1])};
  } else if (s.rfind("OrliczLorentz(", 0) == 0) {
    auto a = detail::split_args(s, "OrliczLorentz");
    if (a.empty()) throw std::invalid_argument("space: OrliczLorentz(r,family,…)");
    out = OrliczLorentz{detail::parse_orlicz(a, 1), detail::parse_double(a[0])};
  } else if (s.rfind("Orlicz(", 0) == 0) {
    out = Orlicz{detail::parse_orlicz(detail::split_args(s, "Orlicz"), 0)};
  } else if (s.rfind("GenLorentz(", 0) == 0) {
    auto a = detail::split_args(s, "GenLorentz");
    if (a.size() != 2) throw std::invalid_argument("space: GenLorentz(a,r)");
    out = GenLorentz{WeightFunction::power(detail::parse_double(a[0])), detail::parse_double(a[1])};
  } else if (s.size() > 1 && s[0] == 'L') {
    out = Lp{detail::parse_double(s.substr(1))};
  } else {
    throw std::invalid_argument("space: unrecognized '" + s + "'");
  }
  validate(out);
  return out;
}

// ---------------------------------------------------------------------------
// Suite configuration

inline json to_json(const InterpFamily& f) {
  return {{"kind", to_string(f.kind)},
          {"p", num(f.p)},
          {"thetas", f.thetas},
          {"gammas", [&] {
             json g = json::array();
             for (double v : f.gammas) g.push_back(num(v));
             return g;
           }()},
          {"phi", to_json(f.phi)},
          {"weight_exponent", f.weight_exponent},
          {"rho_exponent", f.rho_exponent}};
}

inline InterpFamily family_from_json(const json& j) {
  require_keys(j, {"kind", "p", "thetas", "gammas", "phi", "weight_exponent", "rho_exponent"}, "family");
  InterpFamily f;
  if (j.contains("kind")) f.kind = parse_interp_family(j["kind"].get<std::string>());
  if (j.contains("p")) f.p = to_num(j["p"], "family.p");
  if (j.contains("thetas")) f.thetas = to_nums(j["thetas"], "family.thetas");
  if (j.contains("gammas")) f.gammas = to_nums(j["gammas"], "family.gammas");
  if (j.contains("phi")) f.phi = orlicz_from_json(j["phi"]);
  if (j.contains("weight_exponent")) f.weight_exponent = to_num(j["weight_exponent"], "family.weight_exponent");
  if (j.contains("rho_exponent")) f.rho_exponent = to_num(j["rho_exponent"], "family.rho_exponent");
  return f;
}

inline json to_json(const CheckSpec& c) {
  json j{{"name", c.name}};
  if (c.name == "k_closedness") j["p"] = num(c.p);
  if (c.name == "k_closedness" || c.name == "jones_certificates") j["variant"] = to_string(c.variant);
  if (c.name == "jones_certificates") j["points"] = c.points;
  if (c.name == "interpolation") j["family"] = to_json(c.family);
  if (c.name == "dual_doob") j["direction"] = to_string(c.direction);
  if (c.name != "k_closedness" && c.name != "jones_certificates" && c.name != "interpolation") {
    j["space"] = to_json(c.space);
    if (c.name != "davis") j["flavor"] = to_string(c.flavor);
  }
  if (c.band) j["band"] = {c.band->first, num(c.band->second)};
  return j;
}

inline CheckSpec check_from_json(const json& j) {
  require_keys(j, {"name", "p", "variant", "family", "direction", "flavor", "space", "points", "band"}, "check");
  CheckSpec c;
  c.name = need(j, "name", "check").get<std::string>();
  if (j.contains("p")) c.p = to_num(j["p"], "check.p");
  if (j.contains("variant")) c.variant = parse_hardy_variant(j["variant"].get<std::string>());
  if (j.contains("family")) c.family = family_from_json(j["family"]);
  if (j.contains("direction")) c.direction = parse_doob_direction(j["direction"].get<std::string>());
  if (j.contains("flavor")) c.flavor = parse_flavor(j["flavor"].get<std::string>());
  if (j.contains("space")) c.space = space_from_json(j["space"]);
  if (j.contains("points")) c.points = j["points"].get<int>();
  if (j.contains("band")) {
    auto b = to_nums(j["band"], "check.band");
    if (b.size() != 2 || !(b[0] <= b[1])) throw std::invalid_argument("check.band: expected [lo, hi]");
    c.band = std::make_pair(b[0], b[1]);
  }
  return c;
}

inline json to_json(const CheckOptions& o) {
  return {{"epsilon", o.eps},         {"lambda_points", o.lambda_points}, {"grid_points", o.grid_points},
          {"span", o.span},           {"tol", o.tol},                     {"scale", o.scale}};
}

inline CheckOptions options_from_json(const json& j) {
  require_keys(j, {"epsilon", "lambda_points", "grid_points", "span", "tol", "scale"}, "options");
  CheckOptions o;
  if (j.contains("epsilon")) o.eps = to_num(j["epsilon"], "options.epsilon");
  if (j.contains("lambda_points")) o.lambda_points = j["lambda_points"].get<int>();
  if (j.contains("grid_points")) o.grid_points = j["grid_points"].get<int>();
  if (j.contains("span")) o.span = to_num(j["span"], "options.span");
  if (j.contains("tol")) o.tol = to_num(j["tol"], "options.tol");
  if (j.contains("scale")) o.scale = to_num(j["scale"], "options.scale");
  if (!(o.eps > 0.0) || o.lambda_points < 1 || o.grid_points < 2 || !(o.span > 1.0) || !(o.tol >= 0.0) || !(o.scale > 0.0))
    throw std::invalid_argument("options: out of range");
  return o;
}

inline json to_json(const SuiteConfig& cfg) {
  json modes = json::array(), checks = json::array();
  for (Mode m : cfg.modes) modes.push_back(ncmart::to_string(m));
  for (const auto& c : cfg.checks) checks.push_back(to_json(c));
  return {{"seeds", cfg.seeds},
          {"dims", cfg.dims},
          {"levels", cfg.levels},
          {"modes", modes},
          {"options", to_json(cfg.options)},
          {"trend", {{"batches", cfg.trend.batches}, {"alpha", cfg.trend.alpha}}},
          {"threads", cfg.threads},
          {"checks", checks}};
}

/// "seeds" is a list or {"from": s, "count": n}.
inline SuiteConfig config_from_json(const json& j) {
  require_keys(j, {"seeds", "dims", "levels", "modes", "options", "trend", "threads", "checks"}, "config");
  SuiteConfig cfg;
  const json& seeds = need(j, "seeds", "config");
  if (seeds.is_object()) {
    require_keys(seeds, {"from", "count"}, "config.seeds");
    auto from = seeds.value("from", std::uint64_t{0});
    auto count = need(seeds, "count", "config.seeds").get<std::uint64_t>();
    for (std::uint64_t i = 0; i < count; ++i) cfg.seeds.push_back(from + i);
  } else {
    cfg.seeds = seeds.get<std::vector<std::uint64_t>>();
  }
  if (j.contains("dims")) cfg.dims = j["dims"].get<std::vector<int>>();
  if (j.contains("levels")) cfg.levels = j["levels"].get<std::vector<int>>();
  if (j.contains("modes")) {
    cfg.modes.clear();
    for (const auto& m : j["modes"]) cfg.modes.push_back(parse_mode(m.get<std::string>()));
  }
  if (j.contains("options")) cfg.options = options_from_json(j["options"]);
  if (j.contains("trend")) {
    require_keys(j["trend"], {"batches", "alpha"}, "config.trend");
    cfg.trend.batches = j["trend"].value("batches", cfg.trend.batches);
    cfg.trend.alpha = j["trend"].value("alpha", cfg.trend.alpha);
  }
  if (j.contains("threads")) cfg.threads = j["threads"].get<int>();
  for (const auto& c : need(j, "checks", "config")) cfg.checks.push_back(check_from_json(c));
  for (int d : cfg.dims)
    if (d < 1) throw std::invalid_argument("config.dims: must be positive");
  for (int l : cfg.levels)
    if (l < 1) throw std::invalid_argument("config.levels: must be positive");
  return cfg;
}

// ---------------------------------------------------------------------------
// Reports

inline json to_json(const SeedRow& r) {
  json j{{"seed", r.seed}, {"dim", r.dim},          {"levels", r.levels},     {"mode", r.mode},
         {"lhs", num(r.lhs)}, {"rhs", num(r.rhs)}, {"ratio", num(r.ratio)}, {"ratio_lo", num(r.ratio_lo)},
         {"pass", r.pass}};
  if (!std::isnan(r.constant)) j["constant"] = num(r.constant);
  if (r.exact) j["exact"] = true;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

inline json to_json(const RatioReport& r) {
  json rows = json::array(), per_dim = json::array();
  for (const auto& row : r.rows) rows.push_back(to_json(row));
  for (const auto& [d, m] : r.trend.per_dim_max) per_dim.push_back({d, num(m)});
  json j{{"check", r.check},
         {"constant", num(r.constant)},
         {"tol", r.tol},
         {"guarded", r.guarded},
         {"max", num(r.max)},
         {"min", num(r.min)},
         {"median", num(r.median)},
         {"trend",
          {{"applied", r.trend.applied},
           {"increments", r.trend.increments},
           {"decrements", r.trend.decrements},
           {"p_value", r.trend.p_value},
           {"growth", r.trend.growth},
           {"per_dim_max", per_dim}}},
         {"pass", r.pass},
         {"trend_ok", r.trend_ok},
         {"rows", rows}};
  if (r.band) j["band"] = {r.band->first, num(r.band->second)};
  return j;
}

inline SeedRow row_from_json(const json& j) {
  SeedRow r;
  r.seed = j.at("seed").get<std::uint64_t>();
  r.dim = j.at("dim").get<int>();
  r.levels = j.at("levels").get<int>();
  r.mode = j.at("mode").get<std::string>();
  r.lhs = to_num(j.at("lhs"), "row.lhs");
  r.rhs = to_num(j.at("rhs"), "row.rhs");
  r.ratio = to_num(j.at("ratio"), "row.ratio");
  r.ratio_lo = to_num(j.at("ratio_lo"), "row.ratio_lo");
  r.pass = j.at("pass").get<bool>();
  if (j.contains("constant")) r.constant = to_num(j["constant"], "row.constant");
  r.exact = j.value("exact", false);
  r.note = j.value("note", std::string());
  return r;
}

inline RatioReport ratio_report_from_json(const json& j) {
  RatioReport r;
  r.check = j.at("check").get<std::string>();
  r.constant = to_num(j.at("constant"), "report.constant");
  r.tol = to_num(j.at("tol"), "report.tol");
  r.guarded = j.at("guarded").get<bool>();
  r.max = to_num(j.at("max"), "report.max");
  r.min = to_num(j.at("min"), "report.min");
  r.median = to_num(j.at("median"), "report.median");
  r.pass = j.at("pass").get<bool>();
  r.trend_ok = j.value("trend_ok", true);
  const json& t = j.at("trend");
  r.trend.applied = t.at("applied").get<bool>();
  r.trend.increments = t.at("increments").get<int>();
  r.trend.decrements = t.at("decrements").get<int>();
  r.trend.p_value = t.at("p_value").get<double>();
  r.trend.growth = t.at("growth").get<bool>();
  for (const auto& e : t.at("per_dim_max")) r.trend.per_dim_max.emplace_back(e[0].get<int>(), to_num(e[1], "trend"));
  for (const auto& row : j.at("rows")) r.rows.push_back(row_from_json(row));
  if (j.contains("band")) r.band = std::make_pair(to_num(j["band"][0], "band"), to_num(j["band"][1], "band"));
  return r;
}

/// Deterministic body; the caller adds a "header" with timestamps.
inline json to_json(const Report& rep) {
  json reports = json::array();
  for (const auto& r : rep.reports) reports.push_back(to_json(r));
  return {{"instances", rep.instances}, {"pass", rep.pass}, {"trend_ok", rep.trend_ok}, {"reports", reports}};
}

inline Report report_from_json(const json& j) {
  Report rep;
  rep.instances = j.value("instances", std::size_t{0});
  rep.pass = j.at("pass").get<bool>();
  rep.trend_ok = j.value("trend_ok", true);
  for (const auto& r : j.at("reports")) rep.reports.push_back(ratio_report_from_json(r));
  return rep;
}

inline json to_json(const JonesDecomposition& J) {
  const auto& c = J.cert;
  return {{"t", J.t},
          {"epsilon", J.eps},
          {"lambda", J.lambda},
          {"cost", J.cost},
          {"norm_y", J.norm_y},
          {"norm_z", J.norm_z},
          {"kref", J.kref},
          {"certificates",
           {{"z_bound", {{"ok", c.z_ok}, {"value", c.z_norm}, {"bound", c.z_bound}}},
            {"y_bound", {{"ok", c.y_ok}, {"value", c.y_norm}, {"bound", c.y_bound}}},
            {"trace_bound", {{"ok", c.trace_ok}, {"trace_q", c.trace_q}, {"trace_pi", c.trace_pi}, {"bound", c.trace_bound}}},
            {"cost_bound", {{"ok", c.cost_ok}, {"value", c.cost}, {"bound", c.cost_bound}}}}},
          {"checks",
           {{"sum_residual", c.sum_residual},
            {"sum_ok", c.sum_ok},
            {"increments_bounded", c.increments_bounded},
            {"beta_submajorized", c.beta_submajorized},
            {"alpha_submajorized", c.alpha_submajorized},
            {"z_submajorized", c.z_submajorized},
            {"cuculescu_ok", c.cuculescu_ok}}},
          {"all_ok", c.all()}};
}

// ---------------------------------------------------------------------------
// CSV

/// Shortest round-trip decimal form; non-finite as inf/-inf/nan.
inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

/// RFC 4180: quote fields holding a comma, quote, CR or LF; double quotes.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

inline std::string csv_line(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) line += (i ? "," : "") + csv_field(fields[i]);
  return line + "\r\n";
}

/// Columns: t,lower,upper,ratio,certificate_id
inline std::string kcurve_csv(const KCurve& c) {
  std::string out = csv_line({"t", "lower", "upper", "ratio", "certificate_id"});
  for (std::size_t i = 0; i < c.size(); ++i) {
    double r = c.lower[i] > 0.0 ? c.upper[i] / c.lower[i] : no_constant;
    out += csv_line({fmt(c.t[i]), fmt(c.lower[i]), fmt(c.upper[i]), fmt(r),
                     i < c.certificate_id.size() ? c.certificate_id[i] : ""});
  }
  return out;
}

/// Columns: check,seed,dim,levels,mode,lhs,rhs,ratio,ratio_lo,constant,pass,note
inline std::string report_csv(const Report& rep) {
  std::string out =
      csv_line({"check", "seed", "dim", "levels", "mode", "lhs", "rhs", "ratio", "ratio_lo", "constant", "pass", "note"});
  for (const auto& r : rep.reports)
    for (const auto& row : r.rows)
      out += csv_line({r.check, std::to_string(row.seed), std::to_string(row.dim), std::to_string(row.levels), row.mode,
                       fmt(row.lhs), fmt(row.rhs), fmt(row.ratio), fmt(row.ratio_lo),
                       std::isnan(row.constant) ? "" : fmt(row.constant), row.pass ? "true" : "false", row.note});
  return out;
}

/// Fixed-width summary, one line per check.
inline std::string summary_table(const Report& rep) {
  std::string out;
  char buf[512];
  std::snprintf(buf, sizeof buf, "%-60s %6s %10s %10s %10s %10s %6s %s\n", "check", "rows", "min", "median", "max",
                "constant", "trend", "result");
  out += buf;
  for (const auto& r : rep.reports) {
    std::string trend = !r.trend.applied ? "-" : !r.trend.growth ? "flat" : r.trend_ok ? "grow*" : "GROW";
    std::snprintf(buf, sizeof buf, "%-60s %6zu %10.5g %10.5g %10.5g %10s %6s %s\n", r.check.c_str(), r.rows.size(),
                  r.min, r.median, r.max, r.asserted() ? fmt(r.constant).substr(0, 10).c_str() : "-", trend.c_str(),
                  r.pass ? "PASS" : "FAIL");
    out += buf;
  }
  out += std::string("rows: ") + (rep.pass ? "PASS" : "FAIL") + "   trend guard: " + (rep.trend_ok ? "ok" : "growth flagged") +
         "   (grow* = growth under an asserted constant or unguarded, not a failure)\n";
  return out;
}

}  // namespace ncmart::io
