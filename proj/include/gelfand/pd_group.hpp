#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"
#include "random.hpp"
#include "tolerances.hpp"

namespace gelfand {

// ---------------------------------------------------------------------------
// Groups

enum class group_kind { euclidean, integers, circle, cyclic, trivial };

// Concrete locally compact abelian group L. `param` is k for R^k and Z^k, N
// for T^N, and M for Z/M; unused for the trivial group.
struct GroupDescriptor {
  group_kind kind = group_kind::trivial;
  int param = 0;

  static GroupDescriptor euclidean(int k) { return make(group_kind::euclidean, k, 1); }
  static GroupDescriptor integers(int k) { return make(group_kind::integers, k, 1); }
  static GroupDescriptor circle(int n) { return make(group_kind::circle, n, 1); }
  static GroupDescriptor cyclic(int m) { return make(group_kind::cyclic, m, 1); }
  static GroupDescriptor trivial() { return {group_kind::trivial, 0}; }

  // Number of coordinates of an element.
  int coords() const noexcept {
    switch (kind) {
    case group_kind::cyclic: return 1;
    case group_kind::trivial: return 0;
    default: return param;
    }
  }

  std::string to_string() const {
    switch (kind) {
    case group_kind::euclidean: return "euclidean:" + std::to_string(param);
    case group_kind::integers: return "integers:" + std::to_string(param);
    case group_kind::circle: return "circle:" + std::to_string(param);
    case group_kind::cyclic: return "cyclic:" + std::to_string(param);
    case group_kind::trivial: return "trivial";
    }
    return {};
  }

  static GroupDescriptor parse(std::string_view text);

  friend bool operator==(const GroupDescriptor&, const GroupDescriptor&) = default;

private:
  static GroupDescriptor make(group_kind kind, int param, int min) {
    if (param < min) {
      throw parameter_error("group parameter must be >= " + std::to_string(min) + ", got " +
                            std::to_string(param));
    }
    return {kind, param};
  }
};

inline GroupDescriptor GroupDescriptor::parse(std::string_view text) {
  if (text == "trivial") return trivial();
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw parameter_error("group '" + std::string(text) +
                          "': expected euclidean:<k>|integers:<k>|circle:<N>|cyclic:<M>|trivial");
  }
  const auto name = text.substr(0, colon);
  const std::string arg(text.substr(colon + 1));
  std::size_t used = 0;
  int value = 0;
  try {
    value = std::stoi(arg, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != arg.size()) {
    throw parameter_error("group '" + std::string(text) + "': parameter is not an integer");
  }
  if (name == "euclidean") return euclidean(value);
  if (name == "integers") return integers(value);
  if (name == "circle") return circle(value);
  if (name == "cyclic") return cyclic(value);
  throw parameter_error("group '" + std::string(text) + "': unknown group kind");
}

// Element of an abelian group L, stored as coordinates: reals for R^k, angles
// for T^N (any real, read mod 2π), integers for Z^k, a residue in [0, M) for
// Z/M, nothing for the trivial group.
struct GroupElement {
  std::vector<double> coords;

  friend bool operator==(const GroupElement&, const GroupElement&) = default;
};

inline void check_element(const GroupDescriptor& g, const GroupElement& u) {
  if (static_cast<int>(u.coords.size()) != g.coords()) {
    throw usage_error("group element has " + std::to_string(u.coords.size()) +
                      " coordinates, " + g.to_string() + " needs " + std::to_string(g.coords()));
  }
  for (double c : u.coords) {
    if (!std::isfinite(c)) throw usage_error("group element has a non-finite coordinate");
    if ((g.kind == group_kind::integers || g.kind == group_kind::cyclic) && c != std::round(c)) {
      throw usage_error("group element for " + g.to_string() + " must be integral");
    }
    if (g.kind == group_kind::cyclic && (c < 0 || c >= g.param)) {
      throw usage_error("residue out of range for " + g.to_string());
    }
  }
}

inline GroupElement identity_element(const GroupDescriptor& g) {
  return GroupElement{std::vector<double>(static_cast<std::size_t>(g.coords()), 0.0)};
}

inline GroupElement inverse(const GroupDescriptor& g, GroupElement u) {
  for (double& c : u.coords) {
    c = g.kind == group_kind::cyclic ? std::fmod(g.param - c, g.param) : -c;
    if (c == 0.0) c = 0.0; // drop negative zero
  }
  return u;
}

// u⁻¹ v, written additively since every supported L is abelian.
inline GroupElement difference(const GroupDescriptor& g, const GroupElement& u,
                               const GroupElement& v) {
  GroupElement out = v;
  for (std::size_t i = 0; i < out.coords.size(); ++i) {
    out.coords[i] -= u.coords[i];
    if (g.kind == group_kind::cyclic) {
      out.coords[i] = std::fmod(out.coords[i] + g.param, static_cast<double>(g.param));
    }
  }
  return out;
}

// Documented sampling domains for random finite subsets of L.
struct SamplingBox {
  double euclidean_half_width = 5.0;
  int lattice_half_width = 10;
};

inline GroupElement random_element(const GroupDescriptor& g, splitmix64& rng,
                                   const SamplingBox& box = {}) {
  GroupElement u{std::vector<double>(static_cast<std::size_t>(g.coords()))};
  for (double& c : u.coords) {
    switch (g.kind) {
    case group_kind::euclidean:
      c = rng.uniform(-box.euclidean_half_width, box.euclidean_half_width);
      break;
    case group_kind::integers:
      c = static_cast<double>(rng.uniform_int(-box.lattice_half_width, box.lattice_half_width));
      break;
    case group_kind::circle: c = rng.uniform(0.0, 2.0 * std::numbers::pi); break;
    case group_kind::cyclic: c = static_cast<double>(rng.uniform_int(0, g.param - 1)); break;
    case group_kind::trivial: break;
    }
  }
  return u;
}

// ---------------------------------------------------------------------------
// Positive definite functions

namespace pd {

struct Gaussian {
  double a;
};
struct Exponential {
  double a;
};
struct Cosine {
  std::vector<double> freq;
};
struct Constant {
  double c;
};
struct Character {
  std::vector<double> freq;
};
struct Table {
  std::vector<std::complex<double>> values;
};

} // namespace pd

class PDFunction;

namespace pd {

struct Sum {
  std::vector<PDFunction> terms;
};
struct Product {
  std::vector<PDFunction> factors;
};
struct Scale {
  double r;
  std::vector<PDFunction> inner; // exactly one element
};

using Expr = std::variant<Gaussian, Exponential, Cosine, Constant, Character, Table, Sum, Product,
                          Scale>;

} // namespace pd

// Continuous positive definite function on a concrete group L, built from the
// catalog leaves and closed under sums, products and nonnegative scaling.
// Immutable; copies share the expression tree.
class PDFunction {
public:
  static PDFunction gaussian(GroupDescriptor g, double a);
  static PDFunction exponential(GroupDescriptor g, double a);
  static PDFunction cosine(GroupDescriptor g, std::vector<double> freq);
  static PDFunction constant(GroupDescriptor g, double c);
  static PDFunction character(GroupDescriptor g, std::vector<double> freq);
  static PDFunction table(GroupDescriptor g, std::vector<std::complex<double>> values);
  static PDFunction sum(std::vector<PDFunction> terms);
  static PDFunction product(std::vector<PDFunction> factors);
  static PDFunction scale(double r, PDFunction f);

  std::complex<double> operator()(const GroupElement& u) const {
    check_element(node_->group, u);
    return eval_unchecked(u);
  }

  const GroupDescriptor& group() const noexcept { return node_->group; }
  const pd::Expr& expr() const noexcept { return node_->expr; }
  // f(e_L), real and nonnegative.
  double identity_value() const noexcept { return node_->identity; }
  std::string provenance() const;

private:
  struct Node {
    GroupDescriptor group;
    pd::Expr expr;
    double identity = 0.0;
  };

  explicit PDFunction(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static PDFunction make(GroupDescriptor g, pd::Expr e);
  std::complex<double> eval_unchecked(const GroupElement& u) const;

  std::shared_ptr<const Node> node_;
};

namespace detail {

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const std::vector<double>& a) { return dot(a, a); }

inline void require_positive(double a, const char* what) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw parameter_error(std::string(what) + ": parameter must be finite and > 0");
  }
}

inline void require_nonneg(double a, const char* what) {
  if (!(a >= 0.0) || !std::isfinite(a)) {
    throw parameter_error(std::string(what) + ": parameter must be finite and >= 0");
  }
}

inline void require_groups(const GroupDescriptor& g, std::initializer_list<group_kind> allowed,
                           const char* what) {
  for (auto k : allowed) {
    if (g.kind == k) return;
  }
  throw usage_error(std::string(what) + " is not available on " + g.to_string());
}

inline void require_frequency(const GroupDescriptor& g, const std::vector<double>& freq,
                              const char* what) {
  if (static_cast<int>(freq.size()) != g.coords()) {
    throw parameter_error(std::string(what) + ": frequency vector has " +
                          std::to_string(freq.size()) + " entries, group needs " +
                          std::to_string(g.coords()));
  }
  for (double w : freq) {
    if (!std::isfinite(w)) throw parameter_error(std::string(what) + ": non-finite frequency");
    if ((g.kind == group_kind::circle || g.kind == group_kind::cyclic) && w != std::round(w)) {
      throw parameter_error(std::string(what) + ": frequencies on " + g.to_string() +
                            " must be integers");
    }
  }
}

// Phase ω·u of a character, with the 2π/M scaling on Z/M.
inline double phase(const GroupDescriptor& g, const std::vector<double>& freq,
                    const GroupElement& u) {
  const double p = dot(freq, u.coords);
  return g.kind == group_kind::cyclic ? 2.0 * std::numbers::pi * p / g.param : p;
}

} // namespace detail

inline PDFunction PDFunction::make(GroupDescriptor g, pd::Expr e) {
  auto node = std::make_shared<Node>(Node{g, std::move(e), 0.0});
  PDFunction f(node);
  const auto at_e = f.eval_unchecked(identity_element(g));
  if (!(at_e.real() >= -1e-15) || std::abs(at_e.imag()) > 1e-12) {
    throw parameter_error("positive definite function must be real and >= 0 at the identity");
  }
  node->identity = std::max(0.0, at_e.real());
  return f;
}

inline PDFunction PDFunction::gaussian(GroupDescriptor g, double a) {
  detail::require_positive(a, "gaussian");
  detail::require_groups(g, {group_kind::euclidean, group_kind::integers}, "gaussian");
  return make(g, pd::Gaussian{a});
}

inline PDFunction PDFunction::exponential(GroupDescriptor g, double a) {
  detail::require_positive(a, "exponential");
  detail::require_groups(g, {group_kind::euclidean, group_kind::integers}, "exponential");
  return make(g, pd::Exponential{a});
}

inline PDFunction PDFunction::cosine(GroupDescriptor g, std::vector<double> freq) {
  detail::require_groups(
      g, {group_kind::euclidean, group_kind::integers, group_kind::circle, group_kind::cyclic},
      "cosine");
  detail::require_frequency(g, freq, "cosine");
  return make(g, pd::Cosine{std::move(freq)});
}

inline PDFunction PDFunction::constant(GroupDescriptor g, double c) {
  detail::require_nonneg(c, "constant");
  return make(g, pd::Constant{c});
}

inline PDFunction PDFunction::character(GroupDescriptor g, std::vector<double> freq) {
  detail::require_groups(
      g, {group_kind::euclidean, group_kind::integers, group_kind::circle, group_kind::cyclic},
      "character");
  detail::require_frequency(g, freq, "character");
  return make(g, pd::Character{std::move(freq)});
}

inline PDFunction PDFunction::table(GroupDescriptor g, std::vector<std::complex<double>> values) {
  detail::require_groups(g, {group_kind::cyclic}, "table");
  if (static_cast<int>(values.size()) != g.param) {
    throw parameter_error("table: needs exactly M = " + std::to_string(g.param) + " values");
  }
  const std::size_t m = values.size();
  for (std::size_t j = 0; j < m; ++j) {
    if (std::abs(values[(m - j) % m] - std::conj(values[j])) > tolerance::hermitian) {
      throw parameter_error("table: values must satisfy f(-j) = conj f(j)");
    }
  }
  values[0] = values[0].real();
  for (std::size_t j = 1; j < m; ++j) {
    if (std::abs(values[j]) > values[0].real() + tolerance::hermitian) {
      throw parameter_error("table: |f(j)| exceeds f(0)");
    }
  }
  return make(g, pd::Table{std::move(values)});
}

inline PDFunction PDFunction::sum(std::vector<PDFunction> terms) {
  if (terms.empty()) throw parameter_error("sum: needs at least one term");
  const auto g = terms.front().group();
  for (const auto& t : terms) {
    if (!(t.group() == g)) throw usage_error("sum: terms live on different groups");
  }
  return make(g, pd::Sum{std::move(terms)});
}

inline PDFunction PDFunction::product(std::vector<PDFunction> factors) {
  if (factors.empty()) throw parameter_error("product: needs at least one factor");
  const auto g = factors.front().group();
  for (const auto& t : factors) {
    if (!(t.group() == g)) throw usage_error("product: factors live on different groups");
  }
  return make(g, pd::Product{std::move(factors)});
}

inline PDFunction PDFunction::scale(double r, PDFunction f) {
  detail::require_nonneg(r, "scale");
  const auto g = f.group();
  return make(g, pd::Scale{r, {std::move(f)}});
}

inline std::complex<double> PDFunction::eval_unchecked(const GroupElement& u) const {
  const auto& g = node_->group;
  return std::visit(
      [&](const auto& e) -> std::complex<double> {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, pd::Gaussian>) {
          return std::exp(-e.a * detail::norm2(u.coords));
        } else if constexpr (std::is_same_v<T, pd::Exponential>) {
          return std::exp(-e.a * std::sqrt(detail::norm2(u.coords)));
        } else if constexpr (std::is_same_v<T, pd::Cosine>) {
          return std::cos(detail::phase(g, e.freq, u));
        } else if constexpr (std::is_same_v<T, pd::Constant>) {
          return e.c;
        } else if constexpr (std::is_same_v<T, pd::Character>) {
          return std::polar(1.0, detail::phase(g, e.freq, u));
        } else if constexpr (std::is_same_v<T, pd::Table>) {
          return e.values[static_cast<std::size_t>(u.coords[0])];
        } else if constexpr (std::is_same_v<T, pd::Sum>) {
          std::complex<double> s{0.0, 0.0};
          for (const auto& t : e.terms) s += t.eval_unchecked(u);
          return s;
        } else if constexpr (std::is_same_v<T, pd::Product>) {
          std::complex<double> s{1.0, 0.0};
          for (const auto& t : e.factors) s *= t.eval_unchecked(u);
          return s;
        } else {
          return e.r * e.inner.front().eval_unchecked(u);
        }
      },
      node_->expr);
}

inline std::string PDFunction::provenance() const {
  return std::visit(
      [](const auto& e) -> std::string {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, pd::Gaussian>) {
          return "exp(-a|u|^2): characteristic function of the centred Gaussian law N(0, 2a I)";
        } else if constexpr (std::is_same_v<T, pd::Exponential>) {
          return "exp(-a|u|): characteristic function of the isotropic multivariate Cauchy law "
                 "with scale a";
        } else if constexpr (std::is_same_v<T, pd::Cosine>) {
          return "cos(w.u): mean of the characters for w and -w";
        } else if constexpr (std::is_same_v<T, pd::Constant>) {
          return "c >= 0: nonnegative multiple of the trivial character";
        } else if constexpr (std::is_same_v<T, pd::Character>) {
          return "exp(i w.u): character of an abelian group, rank-one Gram matrices";
        } else if constexpr (std::is_same_v<T, pd::Table>) {
          return "value table on Z/M: positive definite iff its discrete Fourier transform is "
                 ">= 0, certified exactly by the full-group Gram matrix";
        } else if constexpr (std::is_same_v<T, pd::Sum>) {
          return "sum of positive definite functions";
        } else if constexpr (std::is_same_v<T, pd::Product>) {
          return "pointwise product of positive definite functions (Schur product)";
        } else {
          return "nonnegative multiple of a positive definite function";
        }
      },
      node_->expr);
}

// Catalog entry for `catalog` listings.
struct CatalogLeaf {
  std::string name;
  std::string parameters;
  std::string groups;
  std::string provenance;
};

inline std::vector<CatalogLeaf> catalog() {
  const auto e = GroupDescriptor::euclidean(1);
  const auto m = GroupDescriptor::cyclic(1);
  return {
      {"gaussian", "a > 0", "euclidean, integers", PDFunction::gaussian(e, 1).provenance()},
      {"exponential", "a > 0", "euclidean, integers", PDFunction::exponential(e, 1).provenance()},
      {"cosine", "freq (integer on circle/cyclic)", "euclidean, integers, circle, cyclic",
       PDFunction::cosine(e, {1}).provenance()},
      {"constant", "c >= 0", "all", PDFunction::constant(e, 1).provenance()},
      {"character", "freq (integer on circle/cyclic)", "euclidean, integers, circle, cyclic",
       PDFunction::character(e, {1}).provenance()},
      {"table", "values[M], hermitian", "cyclic", PDFunction::table(m, {1.0}).provenance()},
      {"sum", "terms", "any (shared)", PDFunction::sum({PDFunction::constant(e, 1)}).provenance()},
      {"product", "factors", "any (shared)",
       PDFunction::product({PDFunction::constant(e, 1)}).provenance()},
      {"scale", "r >= 0", "any", PDFunction::scale(1, PDFunction::constant(e, 1)).provenance()},
  };
}

// ---------------------------------------------------------------------------
// Gram matrices and certification

// Gram matrix [f(u_j⁻¹ u_k)]. Only the upper triangle is evaluated; the lower
// triangle is its conjugate mirror and the diagonal is taken real, so the
// result is exactly hermitian.
template <class F>
cmatrix gram_matrix(const F& f, const GroupDescriptor& g, std::span<const GroupElement> points) {
  if (points.empty()) throw usage_error("gram_matrix: needs at least one point");
  for (const auto& u : points) check_element(g, u);
  const auto n = static_cast<Eigen::Index>(points.size());
  cmatrix m(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& uj = points[static_cast<std::size_t>(j)];
    m(j, j) = std::complex<double>(f(difference(g, uj, uj))).real();
    for (Eigen::Index k = j + 1; k < n; ++k) {
      const std::complex<double> v = f(difference(g, uj, points[static_cast<std::size_t>(k)]));
      m(j, k) = v;
      m(k, j) = std::conj(v);
    }
  }
  return m;
}

inline cmatrix gram_matrix(const PDFunction& f, std::span<const GroupElement> points) {
  return gram_matrix(f, f.group(), points);
}

struct CertifyOptions {
  SamplingBox box{};
  // Negative means the default psd_per_point * n_points.
  double tolerance = -1.0;
};

// Random finite-subset PSD test. On Z/M the whole group is used once, which
// makes the test exact; on the trivial group a single point suffices.
template <class F>
GramReport certify_pd(const F& f, const GroupDescriptor& g, int trials, int n_points,
                      std::uint64_t seed, const CertifyOptions& opts = {}) {
  if (trials < 1 || n_points < 1) throw parameter_error("certify_pd: trials and n_points must be >= 1");
  GramReport report;
  report.seed = seed;

  const bool exhaustive = g.kind == group_kind::cyclic || g.kind == group_kind::trivial;
  const int size = g.kind == group_kind::cyclic ? g.param : (g.kind == group_kind::trivial ? 1 : n_points);
  report.size = size;
  report.tolerance = opts.tolerance >= 0 ? opts.tolerance : tolerance::psd_per_point * size;

  const int rounds = exhaustive ? 1 : trials;
  std::vector<GroupElement> points(static_cast<std::size_t>(size));
  for (int t = 0; t < rounds; ++t) {
    const auto trial_seed = derive_seed(seed, static_cast<std::uint64_t>(t));
    if (g.kind == group_kind::cyclic) {
      for (int r = 0; r < size; ++r) points[static_cast<std::size_t>(r)].coords = {double(r)};
    } else {
      splitmix64 rng(trial_seed);
      for (auto& u : points) u = random_element(g, rng, opts.box);
    }
    report.record(t, trial_seed, min_eigen_hermitian(gram_matrix(f, g, points)));
  }
  return report;
}

inline GramReport certify_pd(const PDFunction& f, int trials, int n_points, std::uint64_t seed,
                             const CertifyOptions& opts = {}) {
  return certify_pd(f, f.group(), trials, n_points, seed, opts);
}

} // namespace gelfand
