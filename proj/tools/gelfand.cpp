// gelfand: command-line front end.
//
//   gelfand <command> [--config job.json] [flags]
//
// Flags override the corresponding keys of the config document; the merged
// document goes through the same strict parser either way.

#include <fstream>
#include <iostream>
#include <sstream>
#include <optional>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "cli_app.hpp"

int main(int argc, char** argv) {
  using gelfand::cli::json;
  CLI::App app{"Spherical-function expansions and positive definite kernels on Gelfand pairs"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> pair, group, in, out, report;
  std::optional<int> order, max_degree, trials, points, pairs, grid;
  std::optional<long long> samples;
  std::optional<std::uint64_t> seed;
  std::optional<double> tolerance;
  std::vector<std::string> u;

  const std::map<std::string, std::string> about{
      {"expand", "coefficient table of a kernel spec at sample group elements"},
      {"synthesize", "evaluate a spec or coefficient CSV on a double-coset grid"},
      {"validate", "random Gram-matrix PSD check of a spec and its coefficients"},
      {"orthotest", "orthonormality residuals of the spherical functions"},
      {"feqtest", "Monte Carlo check of the spherical functional equation"},
      {"simulate", "draw a Gaussian random field with the spec as covariance"},
      {"catalog", "list the positive definite building blocks"}};
  for (const auto& name : gelfand::cli::commands()) {
    auto* sub = app.add_subcommand(name, about.at(name));
    sub->add_option("--config", config_path, "JSON job document");
    sub->add_option("--pair", pair, "e.g. real:2, complex:3, torus:1, product:real:2,complex:2");
    sub->add_option("--group", group, "euclidean:k, integers:k, circle:N, cyclic:M or trivial");
    sub->add_option("--order", order, "quadrature order (points per axis for torus pairs)");
    sub->add_option("--max-degree", max_degree, "truncation degree");
    sub->add_option("--seed", seed, "master seed");
    sub->add_option("--tolerance", tolerance, "verification tolerance");
    sub->add_option("--in", in, "input file");
    sub->add_option("--out", out, "output file");
    sub->add_option("--report", report, "also write the JSON report here");
    sub->add_option("--trials", trials, "random trials");
    sub->add_option("--points", points, "points per trial / field points");
    sub->add_option("--samples", samples, "Monte Carlo samples");
    sub->add_option("--pairs", pairs, "random point pairs");
    sub->add_option("--grid", grid, "synthesis grid points per axis");
    sub->add_option("--u", u, "group element, ':'-separated coordinates (repeatable)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : gelfand::cli::exit_usage;
  }

  try {
    json j = json::object();
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw gelfand::io::format_error("config", "cannot open '" + config_path + "'");
      std::ostringstream ss;
      ss << f.rdbuf();
      j = gelfand::cli::detail::parse_strict(ss.str());
      if (!j.is_object()) throw gelfand::io::format_error("config", "expected an object");
    }
    const auto command = app.get_subcommands().front()->get_name();
    if (j.contains("command") && j["command"] != command) {
      throw gelfand::io::format_error("command", "config says '" + j["command"].dump() + "' but '" + command + "' was requested");
    }
    j["command"] = command;
    auto set = [&](const char* key, const auto& v) {
      if (v) j[key] = *v;
    };
    set("pair", pair);
    set("group", group);
    set("order", order);
    set("max_degree", max_degree);
    set("seed", seed);
    set("tolerance", tolerance);
    set("in", in);
    set("out", out);
    set("report", report);
    set("trials", trials);
    set("points", points);
    set("samples", samples);
    set("pairs", pairs);
    set("grid", grid);
    if (!u.empty()) {
      json arr = json::array();
      for (const auto& s : u) {
        json e = json::array();
        std::size_t start = 0;
        while (true) {
          const auto pos = s.find(':', start);
          const auto tok = s.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
          try {
            std::size_t used = 0;
            e.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
          } catch (const std::exception&) {
            throw gelfand::io::format_error("u", "not a number: '" + tok + "'");
          }
          if (pos == std::string::npos) break;
          start = pos + 1;
        }
        arr.push_back(e);
      }
      j["u"] = arr;
    }
    const auto cfg = gelfand::cli::parse_config(j.dump());
    return gelfand::cli::run(cfg, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return gelfand::cli::exit_usage;
  }
}
