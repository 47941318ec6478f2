#pragma once

// Batch front end: strict job configuration and the subcommands.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <gelfand/gelfand.hpp>

namespace gelfand::cli {

using io::json;

inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 1;
inline constexpr int exit_failed = 2;

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> c{"expand",  "synthesize", "validate", "orthotest",
                                          "feqtest", "simulate",   "catalog"};
  return c;
}

struct JobConfig {
  std::string command;
  std::optional<PairDescriptor> pair;
  std::optional<GroupDescriptor> group;
  int max_degree = 8;
  // Gauss order (sphere/disc factors) or points per axis (torus factors).
  int order = 16;
  std::optional<std::uint64_t> seed;
  std::optional<double> tolerance;
  std::string in;
  std::string out;
  std::string report;
  int trials = 100;
  int points = 30;
  long long samples = 100000;
  int pairs = 5;
  int grid = 5;
  // Raw group elements; checked against the group once it is known.
  std::vector<std::vector<double>> u;

  friend bool operator==(const JobConfig&, const JobConfig&) = default;
};

namespace detail {

// Parse JSON rejecting duplicate keys at any depth.
inline json parse_strict(const std::string& text) {
  std::vector<std::set<std::string>> seen;
  json::parser_callback_t cb = [&](int, json::parse_event_t ev, json& parsed) {
    switch (ev) {
    case json::parse_event_t::object_start: seen.emplace_back(); break;
    case json::parse_event_t::object_end:
      if (!seen.empty()) seen.pop_back();
      break;
    case json::parse_event_t::key: {
      const auto key = parsed.get<std::string>();
      if (!seen.empty() && !seen.back().insert(key).second) {
        throw io::format_error(key, "duplicate key");
      }
      break;
    }
    default: break;
    }
    return true;
  };
  try {
    return json::parse(text, cb);
  } catch (const json::parse_error& e) {
    throw io::format_error("config", e.what());
  }
}

inline int get_int(const json& j, const std::string& key, int lo) {
  const auto v = io::get_integer(j[key], key);
  if (v < lo) throw io::format_error(key, "must be >= " + std::to_string(lo));
  if (v > 1'000'000'000LL) throw io::format_error(key, "too large");
  return static_cast<int>(v);
}

inline bool needs_pair(const std::string& c) { return c == "orthotest" || c == "feqtest"; }

// Minimal rule size for exact coefficient/orthogonality integrals at
// max_degree: a Gauss rule of order k integrates degree <= 2k-1 exactly, the
// products of two spherical functions reach degree 2*max_degree, so k must be
// at least max_degree + 1; torus grids need 2*max_degree + 1 points per axis.
inline void check_exactness(const JobConfig& c) {
  if (!c.pair) return;
  const bool torus_only = std::all_of(c.pair->factors().begin(), c.pair->factors().end(),
                                      [](const PairFactor& f) { return std::holds_alternative<TorusGroup>(f); });
  if (!torus_only && c.order < c.max_degree + 1) {
    throw io::format_error("order", "quadrature order " + std::to_string(c.order) +
                                        " is below max_degree + 1 = " + std::to_string(c.max_degree + 1) +
                                        ": an order-k Gauss rule is exact only up to degree 2k-1, and "
                                        "products of spherical functions reach degree 2*max_degree");
  }
  if (torus_only && c.order < 2 * c.max_degree + 1) {
    throw io::format_error("order", "torus grid of " + std::to_string(c.order) +
                                        " points per axis cannot resolve frequencies up to 2*max_degree; need >= " +
                                        std::to_string(2 * c.max_degree + 1));
  }
}

} // namespace detail

// Strict parse of a JSON job document. Unknown and duplicate keys, type
// mismatches and out-of-range values are errors naming the offending field.
inline JobConfig parse_config(const std::string& text) {
  const json j = detail::parse_strict(text);
  io::expect_keys(j, "config",
                  {"command", "pair", "group", "max_degree", "order", "seed", "tolerance", "in", "out", "report",
                   "trials", "points", "samples", "pairs", "grid", "u"},
                  {"command"});
  JobConfig c;
  c.command = io::get_string(j["command"], "command");
  if (std::find(commands().begin(), commands().end(), c.command) == commands().end()) {
    throw io::format_error("command", "unknown command '" + c.command + "'");
  }
  if (j.contains("pair") && !j["pair"].is_null()) {
    c.pair = io::at_path("pair", [&] { return PairDescriptor::parse(io::get_string(j["pair"], "pair")); });
  }
  if (j.contains("group") && !j["group"].is_null()) {
    c.group = io::at_path("group", [&] { return GroupDescriptor::parse(io::get_string(j["group"], "group")); });
  }
  if (j.contains("max_degree")) c.max_degree = detail::get_int(j, "max_degree", 0);
  const bool torus_only =
      c.pair && std::all_of(c.pair->factors().begin(), c.pair->factors().end(),
                            [](const PairFactor& f) { return std::holds_alternative<TorusGroup>(f); });
  c.order = torus_only ? 2 * c.max_degree + 1 : c.max_degree + tolerance::extra_order;
  if (j.contains("order")) c.order = detail::get_int(j, "order", 1);
  if (j.contains("seed") && !j["seed"].is_null()) {
    if (!j["seed"].is_number_unsigned()) throw io::format_error("seed", "expected a nonnegative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("tolerance") && !j["tolerance"].is_null()) {
    c.tolerance = io::get_number(j["tolerance"], "tolerance");
    if (!(*c.tolerance >= 0)) throw io::format_error("tolerance", "must be >= 0");
  }
  if (j.contains("in")) c.in = io::get_string(j["in"], "in");
  if (j.contains("out")) c.out = io::get_string(j["out"], "out");
  if (j.contains("report")) c.report = io::get_string(j["report"], "report");
  if (j.contains("trials")) c.trials = detail::get_int(j, "trials", 1);
  if (j.contains("points")) c.points = detail::get_int(j, "points", 1);
  if (j.contains("samples")) {
    const auto v = io::get_integer(j["samples"], "samples");
    if (v < 1) throw io::format_error("samples", "must be >= 1");
    c.samples = v;
  }
  if (j.contains("pairs")) c.pairs = detail::get_int(j, "pairs", 1);
  if (j.contains("grid")) c.grid = detail::get_int(j, "grid", 2);
  if (j.contains("u")) {
    if (!j["u"].is_array()) throw io::format_error("u", "expected an array of group elements");
    for (std::size_t i = 0; i < j["u"].size(); ++i) {
      const auto& e = j["u"][i];
      const auto p = "u[" + std::to_string(i) + "]";
      c.u.push_back(e.is_number() ? std::vector<double>{e.get<double>()} : io::get_numbers(e, p));
      if (c.group) io::element_from_json(*c.group, e, p);
    }
  }

  if (detail::needs_pair(c.command) && !c.pair) {
    throw io::format_error("pair", "required by '" + c.command + "'");
  }
  if (c.command == "simulate" && c.points < 1) throw io::format_error("points", "must be >= 1");
  if ((c.command == "validate") && c.points < 2) throw io::format_error("points", "must be >= 2");
  const std::vector<std::pair<std::string, std::string>> paths{{"in", c.in}, {"out", c.out}, {"report", c.report}};
  for (std::size_t a = 0; a < paths.size(); ++a) {
    for (std::size_t b = a + 1; b < paths.size(); ++b) {
      if (!paths[a].second.empty() && paths[a].second == paths[b].second) {
        throw io::format_error(paths[b].first, "path coincides with '" + paths[a].first + "'");
      }
    }
  }
  detail::check_exactness(c);
  return c;
}

// Effective configuration with all defaults filled; parse_config(dump) == c.
inline json to_json(const JobConfig& c) {
  json j{{"command", c.command}};
  if (c.pair) j["pair"] = c.pair->to_string();
  if (c.group) j["group"] = c.group->to_string();
  j["max_degree"] = c.max_degree;
  j["order"] = c.order;
  if (c.seed) j["seed"] = *c.seed;
  if (c.tolerance) j["tolerance"] = *c.tolerance;
  if (!c.in.empty()) j["in"] = c.in;
  if (!c.out.empty()) j["out"] = c.out;
  if (!c.report.empty()) j["report"] = c.report;
  j["trials"] = c.trials;
  j["points"] = c.points;
  j["samples"] = c.samples;
  j["pairs"] = c.pairs;
  j["grid"] = c.grid;
  json u = json::array();
  for (const auto& e : c.u) u.push_back(e);
  j["u"] = u;
  return j;
}

// ---------------------------------------------------------------------------

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw io::format_error("in", "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw io::format_error("out", "cannot write '" + path + "'");
  f << text;
}

inline bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// A few group elements around the identity for tabulation defaults.
inline std::vector<GroupElement> default_u(const GroupDescriptor& g) {
  std::vector<double> steps;
  switch (g.kind) {
  case group_kind::euclidean: steps = {0.0, 0.5, 1.0, 2.0, -1.0}; break;
  case group_kind::integers: steps = {0.0, 1.0, 2.0, -1.0, 3.0}; break;
  case group_kind::circle: steps = {0.0, std::numbers::pi / 3, std::numbers::pi / 2, std::numbers::pi, 1.5 * std::numbers::pi}; break;
  case group_kind::cyclic:
    for (int r = 0; r < std::min(g.param, 5); ++r) steps.push_back(r);
    break;
  case group_kind::trivial: return {identity_element(g)};
  }
  std::vector<GroupElement> out;
  for (double s : steps) out.push_back(GroupElement{std::vector<double>(static_cast<std::size_t>(g.coords()), s)});
  return out;
}

inline std::vector<GroupElement> resolve_u(const JobConfig& c, const GroupDescriptor& g) {
  if (c.u.empty()) return default_u(g);
  std::vector<GroupElement> out;
  for (std::size_t i = 0; i < c.u.size(); ++i) {
    GroupElement e{c.u[i]};
    io::at_path("u[" + std::to_string(i) + "]", [&] { check_element(g, e); return 0; });
    out.push_back(std::move(e));
  }
  return out;
}

// Rule sized from the job: `order` for Gauss factors (angular 2*order+1 on
// discs) and for torus grids.
inline PairRule job_rule(const PairDescriptor& pair, const JobConfig& c) {
  PairRule rule;
  for (const auto& f : pair.factors()) {
    if (const auto* rs = std::get_if<RealSphere>(&f)) rule.parts.push_back(sphere_rule(c.order, rs->d));
    else if (const auto* cs = std::get_if<ComplexSphere>(&f)) rule.parts.push_back(disc_rule(c.order, 2 * c.order + 1, cs->q));
    else {
      const bool torus_only = pair.arity() == 1;
      rule.parts.push_back(torus_grid(std::get<TorusGroup>(f).n, torus_only ? c.order : 2 * c.max_degree + 1));
    }
  }
  return rule;
}

// Evaluation grid on the double-coset space, `g` points per axis.
inline std::vector<DoubleCosetPoint> coset_grid(const PairDescriptor& pair, int g) {
  std::vector<DoubleCosetPoint> out{DoubleCosetPoint{}};
  for (const auto& f : pair.factors()) {
    std::vector<FactorPoint> pts;
    if (std::holds_alternative<RealSphere>(f)) {
      for (int i = 0; i < g; ++i) pts.push_back(IntervalPoint{-1.0 + 2.0 * i / (g - 1)});
    } else if (std::holds_alternative<ComplexSphere>(f)) {
      for (int i = 0; i < g; ++i) {
        for (int k = 0; k < g; ++k) {
          pts.push_back(DiscPoint{std::polar(static_cast<double>(i) / (g - 1), 2.0 * std::numbers::pi * k / g)});
        }
      }
    } else {
      const int n = std::get<TorusGroup>(f).n;
      const auto grid = torus_grid(n, g);
      for (std::size_t i = 0; i < grid.size(); ++i) pts.push_back(AnglePoint{grid.node(i)});
    }
    std::vector<DoubleCosetPoint> next;
    for (const auto& prefix : out) {
      for (const auto& p : pts) {
        DoubleCosetPoint q = prefix;
        q.parts.push_back(p);
        next.push_back(std::move(q));
      }
    }
    out = std::move(next);
  }
  return out;
}

inline std::string point_string(const DoubleCosetPoint& p) {
  std::string out;
  for (std::size_t i = 0; i < p.parts.size(); ++i) {
    if (i) out += '|';
    if (const auto* t = std::get_if<IntervalPoint>(&p.parts[i])) out += io::fmt(t->t);
    else if (const auto* z = std::get_if<DiscPoint>(&p.parts[i])) out += io::fmt(z->z.real()) + ":" + io::fmt(z->z.imag());
    else {
      const auto& x = std::get<AnglePoint>(p.parts[i]).x;
      for (std::size_t k = 0; k < x.size(); ++k) out += (k ? ":" : "") + io::fmt(x[k]);
    }
  }
  return out;
}

inline std::uint64_t resolve_seed(JobConfig& c, std::ostream& err) {
  if (!c.seed) {
    std::random_device rd;
    c.seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    err << "seed: " << *c.seed << " (generated)\n";
  }
  return *c.seed;
}

inline KernelSpec load_spec(const JobConfig& c) {
  if (c.in.empty()) throw io::format_error("in", "required: path to a kernel spec JSON document");
  const auto text = read_file(c.in);
  json j;
  try {
    j = parse_strict(text);
  } catch (const io::format_error& e) {
    throw io::format_error(c.in, e.what());
  }
  auto spec = io::kernel_spec_from_json(j);
  if (c.pair && !(*c.pair == spec.pair())) throw io::format_error("pair", "does not match the spec's pair " + spec.pair().to_string());
  if (c.group && !(*c.group == spec.group())) throw io::format_error("group", "does not match the spec's group " + spec.group().to_string());
  return spec;
}

inline void emit(const JobConfig& c, const json& report, std::ostream& out) {
  const auto text = report.dump(2) + "\n";
  out << text;
  if (!c.report.empty()) write_file(c.report, text);
}

} // namespace detail

// Runs one job. Exit status: 0 pass, 1 usage/config error, 2 verification
// failure. Reports go to `out` (and to config.report when set); data
// artifacts go to config.out.
inline int run(JobConfig c, std::ostream& out, std::ostream& err) {
  try {
    using namespace detail;
    if (c.command == "catalog") {
      json leaves = json::array();
      for (const auto& leaf : catalog()) {
        leaves.push_back({{"name", leaf.name}, {"parameters", leaf.parameters}, {"groups", leaf.groups}, {"provenance", leaf.provenance}});
      }
      json r{{"schema_version", io::schema_version}, {"config", to_json(c)}, {"leaves", leaves}};
      emit(c, r, out);
      if (!c.out.empty()) write_file(c.out, r.dump(2) + "\n");
      return exit_ok;
    }

    if (c.command == "orthotest") {
      const auto& pair = *c.pair;
      const auto rule = job_rule(pair, c);
      const auto idx = enumerate_indices(pair, c.max_degree);
      const double tol = c.tolerance.value_or(1e-11);
      double worst = 0.0;
      json rows = json::array();
      for (std::size_t a = 0; a < idx.size(); ++a) {
        for (std::size_t b = a; b < idx.size(); ++b) {
          const double r = orthogonality_residual(pair, idx[a], idx[b], rule);
          worst = std::max(worst, r);
          rows.push_back({{"a", idx[a].to_string()}, {"b", idx[b].to_string()}, {"residual", r}});
        }
      }
      const bool pass = worst <= tol;
      json result{{"max_residual", worst}, {"tolerance", tol}, {"verdict", pass ? "pass" : "fail"}, {"residuals", rows}};
      auto r = io::verification_report("orthotest", to_json(c), result, c.seed.value_or(0));
      emit(c, r, out);
      if (!c.out.empty()) write_file(c.out, r.dump(2) + "\n");
      return pass ? exit_ok : exit_failed;
    }

    if (c.command == "feqtest") {
      const auto& pair = *c.pair;
      const auto seed = resolve_seed(c, err);
      const auto idx = enumerate_indices(pair, c.max_degree);
      const double tol = c.tolerance.value_or(5e-3);
      double worst = 0.0;
      json rows = json::array();
      splitmix64 rng(derive_seed(seed, 0));
      for (int p = 0; p < c.pairs; ++p) {
        const auto x = random_sphere_point(pair, rng);
        const auto y = random_sphere_point(pair, rng);
        const auto res = functional_equation_residuals(pair, idx, x, y, c.samples, derive_seed(seed, static_cast<std::uint64_t>(p) + 1));
        for (std::size_t i = 0; i < idx.size(); ++i) {
          worst = std::max(worst, res[i]);
          rows.push_back({{"pair", p}, {"index", idx[i].to_string()}, {"residual", res[i]}});
        }
      }
      const bool pass = worst <= tol;
      json result{{"max_residual", worst}, {"tolerance", tol}, {"verdict", pass ? "pass" : "fail"}, {"residuals", rows}};
      auto r = io::verification_report("feqtest", to_json(c), result, seed);
      emit(c, r, out);
      if (!c.out.empty()) write_file(c.out, r.dump(2) + "\n");
      return pass ? exit_ok : exit_failed;
    }

    if (c.command == "expand") {
      const auto spec = load_spec(c);
      if (c.out.empty()) throw io::format_error("out", "required: coefficient CSV path");
      if (!c.pair) c.pair = spec.pair();
      if (!c.group) c.group = spec.group();
      check_exactness(c);
      const auto rule = job_rule(spec.pair(), c);
      const auto u = resolve_u(c, spec.group());
      auto f = [&](const DoubleCosetPoint& p, const GroupElement& v) { return synthesize(spec, p, v); };
      const auto table = expand(spec.pair(), spec.group(), f, enumerate_indices(spec.pair(), c.max_degree), u, rule);
      std::ostringstream csv;
      io::write_coefficients_csv(csv, table);
      write_file(c.out, csv.str());
      const double full = synthesize(spec, identity_point(spec.pair()), identity_element(spec.group())).real();
      const double tail = tail_bound(table, full);
      json result{{"indices", table.indices.size()},
                  {"u_samples", table.u.size()},
                  {"full_mass", full},
                  {"tail_bound", tail},
                  {"dominance_excess", table.dominance_excess}};
      emit(c, io::verification_report("expand", to_json(c), result, c.seed.value_or(0)), out);
      return exit_ok;
    }

    if (c.command == "synthesize") {
      if (c.in.empty()) throw io::format_error("in", "required: kernel spec JSON or coefficient CSV");
      if (c.out.empty()) throw io::format_error("out", "required: output CSV path");
      std::ostringstream csv;
      csv << "point,u,re,im\n";
      std::size_t rows = 0;
      if (ends_with(c.in, ".csv")) {
        if (!c.pair || !c.group) throw io::format_error("pair", "pair and group are required to read a coefficient CSV");
        std::istringstream is(read_file(c.in));
        const auto table = io::read_coefficients_csv(is, *c.pair, *c.group);
        const auto grid = coset_grid(*c.pair, c.grid);
        for (std::size_t j = 0; j < table.u.size(); ++j) {
          for (const auto& p : grid) {
            const auto v = synthesize(table, p, j);
            csv << point_string(p) << ',' << io::element_string(table.u[j]) << ',' << io::fmt(v.real()) << ',' << io::fmt(v.imag()) << '\n';
            ++rows;
          }
        }
      } else {
        const auto spec = load_spec(c);
        const auto grid = coset_grid(spec.pair(), c.grid);
        for (const auto& u : resolve_u(c, spec.group())) {
          for (const auto& p : grid) {
            const auto v = synthesize(spec, p, u);
            csv << point_string(p) << ',' << io::element_string(u) << ',' << io::fmt(v.real()) << ',' << io::fmt(v.imag()) << '\n';
            ++rows;
          }
        }
      }
      write_file(c.out, csv.str());
      emit(c, io::verification_report("synthesize", to_json(c), json{{"rows", rows}}, c.seed.value_or(0)), out);
      return exit_ok;
    }

    if (c.command == "validate") {
      const auto spec = load_spec(c);
      const auto seed = resolve_seed(c, err);
      auto job = spec_job(spec, c.points, c.trials, derive_seed(seed, 0));
      if (c.tolerance) job.tolerance = *c.tolerance;
      const auto kernel = kernel_psd_check(job);
      bool pass = kernel.pass;
      json terms = json::array();
      for (std::size_t i = 0; i < spec.terms().size(); ++i) {
        CertifyOptions opts;
        if (c.tolerance) opts.tolerance = *c.tolerance;
        const auto rep = certify_pd(spec.terms()[i].coefficient, c.trials, c.points, derive_seed(seed, i + 1), opts);
        pass = pass && rep.pass;
        terms.push_back({{"index", spec.terms()[i].index.to_string()},
                         {"provenance", spec.terms()[i].coefficient.provenance()},
                         {"report", io::to_json(rep)}});
      }
      json result{{"verdict", pass ? "pass" : "fail"}, {"kernel", io::to_json(kernel)}, {"terms", terms}};
      auto r = io::verification_report("validate", to_json(c), result, seed);
      emit(c, r, out);
      if (!c.out.empty()) write_file(c.out, r.dump(2) + "\n");
      return pass ? exit_ok : exit_failed;
    }

    if (c.command == "simulate") {
      const auto spec = load_spec(c);
      if (c.out.empty()) throw io::format_error("out", "required: field CSV path");
      const auto seed = resolve_seed(c, err);
      const auto xi = sample_sphere_points(spec.pair(), c.points, derive_seed(seed, 0));
      splitmix64 grng(derive_seed(seed, 1));
      std::vector<FieldPoint> pts;
      for (const auto& x : xi) pts.push_back({x, random_element(spec.group(), grng)});
      try {
        const auto field = sample_field(spec, std::move(pts), derive_seed(seed, 2));
        std::ostringstream csv;
        io::write_field_csv(csv, field);
        write_file(c.out, csv.str());
        auto meta = io::field_metadata(field);
        meta["config"] = to_json(c);
        write_file(c.out + ".meta.json", meta.dump(2) + "\n");
        emit(c, io::verification_report("simulate", to_json(c), meta, seed), out);
        return exit_ok;
      } catch (const indefinite_kernel_error& e) {
        err << "error: " << e.what() << "\n";
        emit(c, io::verification_report("simulate", to_json(c), json{{"verdict", "refused"}, {"gram", io::to_json(e.report)}}, seed), out);
        return exit_failed;
      }
    }

    throw io::format_error("command", "unknown command '" + c.command + "'");
  } catch (const io::format_error& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const parameter_error& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const usage_error& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const domain_error& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_failed;
  }
}

} // namespace gelfand::cli
