#pragma once

#include <cstdio>
#include <complex>
#include <initializer_list>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "gelfand_core.hpp"
#include "homogeneous_space.hpp"
#include "linalg.hpp"
#include "pd_group.hpp"
#include "quadrature.hpp"
#include "simulation.hpp"

namespace gelfand::io {

using json = nlohmann::ordered_json;

inline constexpr int schema_version = 1;

// Decimal with 17 significant digits; round-trips every double.
inline std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Malformed document; `path` locates the offending field (e.g. terms[2].index).
class format_error : public std::runtime_error {
public:
  format_error(const std::string& path, const std::string& what)
      : std::runtime_error(path + ": " + what), path(path) {}
  std::string path;
};

inline void expect_keys(const json& j, const std::string& path,
                        std::initializer_list<const char*> allowed,
                        std::initializer_list<const char*> required = {}) {
  if (!j.is_object()) throw format_error(path, "expected an object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw format_error(path + "." + key, "unknown key");
  }
  for (const char* r : required) {
    if (!j.contains(r)) throw format_error(path + "." + r, "missing required key");
  }
}

inline double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw format_error(path, "expected a number");
  return j.get<double>();
}

inline long long get_integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw format_error(path, "expected an integer");
  return j.get<long long>();
}

inline std::string get_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw format_error(path, "expected a string");
  return j.get<std::string>();
}

inline std::vector<double> get_numbers(const json& j, const std::string& path) {
  if (!j.is_array()) throw format_error(path, "expected an array of numbers");
  std::vector<double> v;
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(get_number(j[i], path + "[" + std::to_string(i) + "]"));
  return v;
}

// Re-raise library parameter errors with the document path attached.
template <class F>
auto at_path(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const format_error&) {
    throw;
  } catch (const std::exception& e) {
    throw format_error(path, e.what());
  }
}

// ---------------------------------------------------------------------------
// Quadrature rules

inline json to_json(const QuadratureRule& r) {
  return json{{"alpha", r.alpha}, {"beta", r.beta}, {"order", r.order}, {"nodes", r.nodes}, {"weights", r.weights}};
}

inline QuadratureRule rule_from_json(const json& j) {
  expect_keys(j, "rule", {"alpha", "beta", "order", "nodes", "weights"}, {"alpha", "beta", "nodes", "weights"});
  QuadratureRule r;
  r.alpha = get_number(j["alpha"], "rule.alpha");
  r.beta = get_number(j["beta"], "rule.beta");
  r.nodes = get_numbers(j["nodes"], "rule.nodes");
  r.weights = get_numbers(j["weights"], "rule.weights");
  r.order = j.contains("order") ? static_cast<int>(get_integer(j["order"], "rule.order"))
                                : static_cast<int>(r.nodes.size());
  if (r.nodes.size() != r.weights.size()) throw format_error("rule", "nodes and weights differ in length");
  return r;
}

// ---------------------------------------------------------------------------
// Group elements

inline json to_json(const GroupElement& u) { return json(u.coords); }

inline GroupElement element_from_json(const GroupDescriptor& g, const json& j, const std::string& path) {
  GroupElement u;
  if (j.is_number()) u.coords = {j.get<double>()};
  else u.coords = get_numbers(j, path);
  at_path(path, [&] { check_element(g, u); return 0; });
  return u;
}

// Coordinates joined by ':'; the empty string for the trivial group.
inline std::string element_string(const GroupElement& u) {
  std::string out;
  for (std::size_t i = 0; i < u.coords.size(); ++i) {
    if (i) out += ':';
    out += fmt(u.coords[i]);
  }
  return out;
}

inline GroupElement parse_element(const GroupDescriptor& g, const std::string& text) {
  GroupElement u;
  if (!text.empty()) {
    std::size_t start = 0;
    while (true) {
      const auto colon = text.find(':', start);
      const auto tok = text.substr(start, colon == std::string::npos ? std::string::npos : colon - start);
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (tok.empty() || used != tok.size()) throw format_error("u", "bad coordinate '" + tok + "'");
      u.coords.push_back(v);
      if (colon == std::string::npos) break;
      start = colon + 1;
    }
  }
  at_path("u", [&] { check_element(g, u); return 0; });
  return u;
}

// ---------------------------------------------------------------------------
// Positive definite functions

inline json expr_to_json(const PDFunction& f) {
  return std::visit(
      [](const auto& e) -> json {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, pd::Gaussian>) {
          return {{"type", "gaussian"}, {"a", e.a}};
        } else if constexpr (std::is_same_v<T, pd::Exponential>) {
          return {{"type", "exponential"}, {"a", e.a}};
        } else if constexpr (std::is_same_v<T, pd::Cosine>) {
          return {{"type", "cosine"}, {"freq", e.freq}};
        } else if constexpr (std::is_same_v<T, pd::Constant>) {
          return {{"type", "constant"}, {"c", e.c}};
        } else if constexpr (std::is_same_v<T, pd::Character>) {
          return {{"type", "character"}, {"freq", e.freq}};
        } else if constexpr (std::is_same_v<T, pd::Table>) {
          json vals = json::array();
          for (const auto& v : e.values) vals.push_back({v.real(), v.imag()});
          return {{"type", "table"}, {"values", vals}};
        } else if constexpr (std::is_same_v<T, pd::Sum>) {
          json terms = json::array();
          for (const auto& t : e.terms) terms.push_back(expr_to_json(t));
          return {{"type", "sum"}, {"terms", terms}};
        } else if constexpr (std::is_same_v<T, pd::Product>) {
          json fs = json::array();
          for (const auto& t : e.factors) fs.push_back(expr_to_json(t));
          return {{"type", "product"}, {"factors", fs}};
        } else {
          return {{"type", "scale"}, {"r", e.r}, {"f", expr_to_json(e.inner.front())}};
        }
      },
      f.expr());
}

inline PDFunction expr_from_json(const GroupDescriptor& g, const json& j, const std::string& path) {
  if (!j.is_object() || !j.contains("type")) throw format_error(path, "expected an object with a 'type'");
  const auto type = get_string(j["type"], path + ".type");
  auto list = [&](const char* key) {
    const auto& arr = j[key];
    if (!arr.is_array()) throw format_error(path + "." + key, "expected an array");
    std::vector<PDFunction> out;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      out.push_back(expr_from_json(g, arr[i], path + "." + key + "[" + std::to_string(i) + "]"));
    }
    return out;
  };
  return at_path(path, [&]() -> PDFunction {
    if (type == "gaussian") {
      expect_keys(j, path, {"type", "a"}, {"a"});
      return PDFunction::gaussian(g, get_number(j["a"], path + ".a"));
    }
    if (type == "exponential") {
      expect_keys(j, path, {"type", "a"}, {"a"});
      return PDFunction::exponential(g, get_number(j["a"], path + ".a"));
    }
    if (type == "cosine") {
      expect_keys(j, path, {"type", "freq"}, {"freq"});
      return PDFunction::cosine(g, get_numbers(j["freq"], path + ".freq"));
    }
    if (type == "constant") {
      expect_keys(j, path, {"type", "c"}, {"c"});
      return PDFunction::constant(g, get_number(j["c"], path + ".c"));
    }
    if (type == "character") {
      expect_keys(j, path, {"type", "freq"}, {"freq"});
      return PDFunction::character(g, get_numbers(j["freq"], path + ".freq"));
    }
    if (type == "table") {
      expect_keys(j, path, {"type", "values"}, {"values"});
      std::vector<std::complex<double>> vals;
      const auto& arr = j["values"];
      if (!arr.is_array()) throw format_error(path + ".values", "expected an array");
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const auto p = path + ".values[" + std::to_string(i) + "]";
        if (arr[i].is_number()) {
          vals.emplace_back(arr[i].get<double>(), 0.0);
        } else {
          const auto v = get_numbers(arr[i], p);
          if (v.size() != 2) throw format_error(p, "expected [re, im]");
          vals.emplace_back(v[0], v[1]);
        }
      }
      return PDFunction::table(g, std::move(vals));
    }
    if (type == "sum") {
      expect_keys(j, path, {"type", "terms"}, {"terms"});
      return PDFunction::sum(list("terms"));
    }
    if (type == "product") {
      expect_keys(j, path, {"type", "factors"}, {"factors"});
      return PDFunction::product(list("factors"));
    }
    if (type == "scale") {
      expect_keys(j, path, {"type", "r", "f"}, {"r", "f"});
      return PDFunction::scale(get_number(j["r"], path + ".r"), expr_from_json(g, j["f"], path + ".f"));
    }
    throw format_error(path + ".type", "unknown pd function type '" + type + "'");
  });
}

inline json to_json(const PDFunction& f) {
  return json{{"group", f.group().to_string()}, {"expr", expr_to_json(f)}};
}

inline PDFunction pd_function_from_json(const json& j) {
  expect_keys(j, "pd_function", {"group", "expr"}, {"group", "expr"});
  const auto g = at_path("pd_function.group", [&] { return GroupDescriptor::parse(get_string(j["group"], "pd_function.group")); });
  return expr_from_json(g, j["expr"], "pd_function.expr");
}

// ---------------------------------------------------------------------------
// Kernel specs

inline json to_json(const KernelSpec& s) {
  json terms = json::array();
  for (const auto& t : s.terms()) {
    terms.push_back({{"index", t.index.to_string()}, {"pd_function", expr_to_json(t.coefficient)}});
  }
  json params = json::object();
  for (const auto& [k, v] : s.meta().params) params[k] = v;
  return json{{"schema_version", schema_version},
              {"pair", s.pair().to_string()},
              {"group", s.group().to_string()},
              {"terms", terms},
              {"meta", {{"truncation_degree", s.meta().truncation_degree}, {"params", params}}}};
}

inline KernelSpec kernel_spec_from_json(const json& j) {
  expect_keys(j, "spec", {"schema_version", "pair", "group", "terms", "meta"}, {"pair", "group", "terms"});
  if (j.contains("schema_version") && get_integer(j["schema_version"], "spec.schema_version") != schema_version) {
    throw format_error("spec.schema_version", "unsupported schema version");
  }
  const auto pair = at_path("spec.pair", [&] { return PairDescriptor::parse(get_string(j["pair"], "spec.pair")); });
  const auto group = at_path("spec.group", [&] { return GroupDescriptor::parse(get_string(j["group"], "spec.group")); });
  const auto& arr = j["terms"];
  if (!arr.is_array()) throw format_error("spec.terms", "expected an array");
  std::vector<KernelTerm> terms;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto p = "spec.terms[" + std::to_string(i) + "]";
    expect_keys(arr[i], p, {"index", "pd_function"}, {"index", "pd_function"});
    auto idx = at_path(p + ".index", [&] { return parse_index(pair, get_string(arr[i]["index"], p + ".index")); });
    terms.push_back({std::move(idx), expr_from_json(group, arr[i]["pd_function"], p + ".pd_function")});
  }
  KernelMeta meta;
  if (j.contains("meta")) {
    const auto& m = j["meta"];
    expect_keys(m, "spec.meta", {"truncation_degree", "params"});
    if (m.contains("truncation_degree")) {
      meta.truncation_degree = static_cast<int>(get_integer(m["truncation_degree"], "spec.meta.truncation_degree"));
    }
    if (m.contains("params")) {
      if (!m["params"].is_object()) throw format_error("spec.meta.params", "expected an object");
      for (const auto& [k, v] : m["params"].items()) meta.params[k] = get_string(v, "spec.meta.params." + k);
    }
  }
  return at_path("spec", [&] { return KernelSpec(pair, group, std::move(terms), std::move(meta)); });
}

// ---------------------------------------------------------------------------
// Reports

inline json to_json(const GramReport& r) {
  return json{{"size", r.size},
              {"min_eigenvalue", r.min_eigenvalue},
              {"tolerance", r.tolerance},
              {"verdict", r.pass ? "pass" : "fail"},
              {"seed", r.seed},
              {"trials", r.trials},
              {"worst_trial", r.worst_trial},
              {"worst_trial_seed", r.worst_trial_seed}};
}

inline json verification_report(const std::string& check, json params, json result, std::uint64_t seed) {
  return json{{"schema_version", schema_version},
              {"check", check},
              {"params", std::move(params)},
              {"result", std::move(result)},
              {"seed", seed}};
}

// ---------------------------------------------------------------------------
// CSV

// `index,u,re,im`, one row per (index, u), indices outermost.
inline void write_coefficients_csv(std::ostream& os, const CoefficientTable& t) {
  os << "index,u,re,im\n";
  for (std::size_t i = 0; i < t.indices.size(); ++i) {
    for (std::size_t j = 0; j < t.u.size(); ++j) {
      os << t.indices[i].to_string() << ',' << element_string(t.u[j]) << ',' << fmt(t.values[i][j].real())
         << ',' << fmt(t.values[i][j].imag()) << '\n';
    }
  }
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline CoefficientTable read_coefficients_csv(std::istream& is, const PairDescriptor& pair,
                                              const GroupDescriptor& group) {
  std::string line;
  if (!std::getline(is, line) || split_csv_line(line) != std::vector<std::string>{"index", "u", "re", "im"}) {
    throw format_error("csv:1", "expected header 'index,u,re,im'");
  }
  CoefficientTable t;
  t.pair = pair;
  t.group = group;
  std::vector<std::string> index_keys;
  std::vector<std::string> u_keys;
  struct Cell {
    std::size_t i, j;
    std::complex<double> v;
  };
  std::vector<Cell> cells;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto where = "csv:" + std::to_string(lineno);
    const auto f = split_csv_line(line);
    if (f.size() != 4) throw format_error(where, "expected 4 fields");
    std::size_t i = 0;
    while (i < index_keys.size() && index_keys[i] != f[0]) ++i;
    if (i == index_keys.size()) {
      index_keys.push_back(f[0]);
      t.indices.push_back(at_path(where, [&] { return parse_index(pair, f[0]); }));
    }
    std::size_t j = 0;
    while (j < u_keys.size() && u_keys[j] != f[1]) ++j;
    if (j == u_keys.size()) {
      u_keys.push_back(f[1]);
      t.u.push_back(at_path(where, [&] { return parse_element(group, f[1]); }));
    }
    double re = 0, im = 0;
    try {
      re = std::stod(f[2]);
      im = std::stod(f[3]);
    } catch (const std::exception&) {
      throw format_error(where, "bad number");
    }
    cells.push_back({i, j, {re, im}});
  }
  t.values.assign(t.indices.size(), std::vector<std::complex<double>>(t.u.size(), {0.0, 0.0}));
  std::vector<std::vector<bool>> seen(t.indices.size(), std::vector<bool>(t.u.size(), false));
  for (const auto& c : cells) {
    if (seen[c.i][c.j]) throw format_error("csv", "duplicate row for index " + index_keys[c.i]);
    seen[c.i][c.j] = true;
    t.values[c.i][c.j] = c.v;
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    for (std::size_t j = 0; j < seen[i].size(); ++j) {
      if (!seen[i][j]) throw format_error("csv", "missing row for index " + index_keys[i] + ", u " + u_keys[j]);
    }
  }
  return t;
}

// Flat coordinates of a sphere point: real vectors as-is, complex vectors as
// (re, im) pairs, angles as-is.
inline std::vector<double> sphere_coordinates(const SpherePoint& p) {
  std::vector<double> out;
  for (const auto& part : p.parts) {
    if (const auto* v = std::get_if<Eigen::VectorXd>(&part)) {
      for (Eigen::Index i = 0; i < v->size(); ++i) out.push_back((*v)(i));
    } else if (const auto* c = std::get_if<Eigen::VectorXcd>(&part)) {
      for (Eigen::Index i = 0; i < c->size(); ++i) {
        out.push_back((*c)(i).real());
        out.push_back((*c)(i).imag());
      }
    } else {
      for (double a : std::get<std::vector<double>>(part)) out.push_back(a);
    }
  }
  return out;
}

// `x0..x{n-1},u0..u{k-1},value` (or value_re,value_im for complex fields).
inline void write_field_csv(std::ostream& os, const FieldSample& s) {
  if (s.points.empty()) return;
  const auto nx = sphere_coordinates(s.points.front().xi).size();
  const auto nu = s.points.front().u.coords.size();
  for (std::size_t i = 0; i < nx; ++i) os << 'x' << i << ',';
  for (std::size_t i = 0; i < nu; ++i) os << 'u' << i << ',';
  os << (s.complex_valued ? "value_re,value_im" : "value") << '\n';
  for (std::size_t r = 0; r < s.points.size(); ++r) {
    for (double x : sphere_coordinates(s.points[r].xi)) os << fmt(x) << ',';
    for (double u : s.points[r].u.coords) os << fmt(u) << ',';
    os << fmt(s.values[r].real());
    if (s.complex_valued) os << ',' << fmt(s.values[r].imag());
    os << '\n';
  }
}

inline json field_metadata(const FieldSample& s) {
  return json{{"schema_version", schema_version},
              {"seed", s.seed},
              {"jitter", s.jitter_used},
              {"generator", s.generator},
              {"complex_valued", s.complex_valued},
              {"points", s.points.size()}};
}

} // namespace gelfand::io
