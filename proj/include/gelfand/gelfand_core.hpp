#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "pd_group.hpp"
#include "quadrature.hpp"
#include "special_functions.hpp"
#include "tolerances.hpp"

namespace gelfand {

// ---------------------------------------------------------------------------
// Pairs

// (O(d+1), O(d)): spherical functions c_n(d, ·) on [-1, 1].
struct RealSphere {
  int d;
  friend bool operator==(const RealSphere&, const RealSphere&) = default;
};
// (U(q), U(q-1)): spherical functions R^{q-2}_{m,n} on the closed unit disc.
struct ComplexSphere {
  int q;
  friend bool operator==(const ComplexSphere&, const ComplexSphere&) = default;
};
// The torus T^N as a Gelfand pair with trivial K: characters exp(i k·x).
struct TorusGroup {
  int n;
  friend bool operator==(const TorusGroup&, const TorusGroup&) = default;
};

using PairFactor = std::variant<RealSphere, ComplexSphere, TorusGroup>;

// A compact Gelfand pair, possibly a product of pairs. Products are stored
// flattened into their factors; (A×B)×C and A×(B×C) are the same pair.
class PairDescriptor {
public:
  static PairDescriptor real_sphere(int d) {
    if (d < 1) throw parameter_error("real sphere: d must be >= 1, got " + std::to_string(d));
    return PairDescriptor({RealSphere{d}});
  }
  static PairDescriptor complex_sphere(int q) {
    if (q < 2) throw parameter_error("complex sphere: q must be >= 2, got " + std::to_string(q));
    return PairDescriptor({ComplexSphere{q}});
  }
  static PairDescriptor torus(int n) {
    if (n < 1) throw parameter_error("torus: N must be >= 1, got " + std::to_string(n));
    return PairDescriptor({TorusGroup{n}});
  }
  static PairDescriptor product(const PairDescriptor& left, const PairDescriptor& right) {
    std::vector<PairFactor> f = left.factors_;
    f.insert(f.end(), right.factors_.begin(), right.factors_.end());
    return PairDescriptor(std::move(f));
  }

  const std::vector<PairFactor>& factors() const noexcept { return factors_; }
  std::size_t arity() const noexcept { return factors_.size(); }

  // real:<d> | complex:<q> | torus:<N> | product:<pair>,<pair> (right-nested).
  std::string to_string() const {
    std::string out;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
      if (i + 1 < factors_.size()) out += "product:";
      out += factor_string(factors_[i]);
      if (i + 1 < factors_.size()) out += ",";
    }
    return out;
  }

  static PairDescriptor parse(std::string_view text) {
    std::string_view rest = text;
    auto pair = parse_prefix(rest, text);
    if (!rest.empty()) {
      throw parameter_error("pair '" + std::string(text) + "': trailing text '" +
                            std::string(rest) + "'");
    }
    return pair;
  }

  friend bool operator==(const PairDescriptor&, const PairDescriptor&) = default;

private:
  explicit PairDescriptor(std::vector<PairFactor> f) : factors_(std::move(f)) {}

  static std::string factor_string(const PairFactor& f) {
    return std::visit(
        [](const auto& p) -> std::string {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, RealSphere>) return "real:" + std::to_string(p.d);
          else if constexpr (std::is_same_v<T, ComplexSphere>) return "complex:" + std::to_string(p.q);
          else return "torus:" + std::to_string(p.n);
        },
        f);
  }

  static int parse_int(std::string_view& rest, std::string_view whole) {
    std::size_t i = 0;
    if (i < rest.size() && (rest[i] == '-' || rest[i] == '+')) ++i;
    while (i < rest.size() && rest[i] >= '0' && rest[i] <= '9') ++i;
    if (i == 0 || (i == 1 && (rest[0] == '-' || rest[0] == '+'))) {
      throw parameter_error("pair '" + std::string(whole) + "': expected an integer parameter");
    }
    const int v = std::stoi(std::string(rest.substr(0, i)));
    rest.remove_prefix(i);
    return v;
  }

  static PairDescriptor parse_prefix(std::string_view& rest, std::string_view whole) {
    auto take = [&](std::string_view tag) {
      if (rest.substr(0, tag.size()) == tag) {
        rest.remove_prefix(tag.size());
        return true;
      }
      return false;
    };
    if (take("product:")) {
      auto left = parse_prefix(rest, whole);
      if (!take(",")) {
        throw parameter_error("pair '" + std::string(whole) + "': product needs two factors");
      }
      auto right = parse_prefix(rest, whole);
      return product(left, right);
    }
    if (take("real:")) return real_sphere(parse_int(rest, whole));
    if (take("complex:")) return complex_sphere(parse_int(rest, whole));
    if (take("torus:")) return torus(parse_int(rest, whole));
    throw parameter_error("pair '" + std::string(whole) +
                          "': expected real:<d>|complex:<q>|torus:<N>|product:<pair>,<pair>");
  }

  std::vector<PairFactor> factors_;
};

// ---------------------------------------------------------------------------
// Spherical indices

struct RealIndex {
  int n;
  friend bool operator==(const RealIndex&, const RealIndex&) = default;
};
struct ComplexIndex {
  int m;
  int n;
  friend bool operator==(const ComplexIndex&, const ComplexIndex&) = default;
};
struct TorusIndex {
  std::vector<int> k;
  friend bool operator==(const TorusIndex&, const TorusIndex&) = default;
};

using FactorIndex = std::variant<RealIndex, ComplexIndex, TorusIndex>;

// One element of the dual space Z of a pair; one part per pair factor.
struct SphericalIndex {
  std::vector<FactorIndex> parts;

  static SphericalIndex real(int n) { return {{RealIndex{n}}}; }
  static SphericalIndex complex(int m, int n) { return {{ComplexIndex{m, n}}}; }
  static SphericalIndex torus(std::vector<int> k) { return {{TorusIndex{std::move(k)}}}; }
  static SphericalIndex product(const SphericalIndex& a, const SphericalIndex& b) {
    SphericalIndex out = a;
    out.parts.insert(out.parts.end(), b.parts.begin(), b.parts.end());
    return out;
  }

  // "n", "m:n", "k1:k2:..." per factor, factors joined by '|'.
  std::string to_string() const {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i) out += '|';
      std::visit(
          [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, RealIndex>) {
              out += std::to_string(p.n);
            } else if constexpr (std::is_same_v<T, ComplexIndex>) {
              out += std::to_string(p.m) + ":" + std::to_string(p.n);
            } else {
              for (std::size_t j = 0; j < p.k.size(); ++j) {
                if (j) out += ':';
                out += std::to_string(p.k[j]);
              }
            }
          },
          parts[i]);
    }
    return out;
  }

  friend bool operator==(const SphericalIndex&, const SphericalIndex&) = default;
};

inline void check_index(const PairDescriptor& pair, const SphericalIndex& idx) {
  const auto& f = pair.factors();
  if (f.size() != idx.parts.size()) {
    throw usage_error("index " + idx.to_string() + " has " + std::to_string(idx.parts.size()) +
                      " parts, pair " + pair.to_string() + " has " + std::to_string(f.size()) +
                      " factors");
  }
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto& p = idx.parts[i];
    bool ok = false;
    if (std::holds_alternative<RealSphere>(f[i])) {
      ok = std::holds_alternative<RealIndex>(p) && std::get<RealIndex>(p).n >= 0;
    } else if (std::holds_alternative<ComplexSphere>(f[i])) {
      ok = std::holds_alternative<ComplexIndex>(p) && std::get<ComplexIndex>(p).m >= 0 &&
           std::get<ComplexIndex>(p).n >= 0;
    } else {
      ok = std::holds_alternative<TorusIndex>(p) &&
           static_cast<int>(std::get<TorusIndex>(p).k.size()) == std::get<TorusGroup>(f[i]).n;
    }
    if (!ok) {
      throw usage_error("index " + idx.to_string() + " does not match pair " + pair.to_string());
    }
  }
}

inline SphericalIndex parse_index(const PairDescriptor& pair, std::string_view text) {
  SphericalIndex idx;
  const auto& f = pair.factors();
  std::string_view rest = text;
  auto ints = [&](std::string_view part) {
    std::vector<int> v;
    std::size_t start = 0;
    while (true) {
      const auto colon = part.find(':', start);
      const std::string tok(part.substr(start, colon == std::string_view::npos ? std::string_view::npos
                                                                                : colon - start));
      std::size_t used = 0;
      int x = 0;
      try {
        x = std::stoi(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (tok.empty() || used != tok.size()) {
        throw parameter_error("index '" + std::string(text) + "': bad integer '" + tok + "'");
      }
      v.push_back(x);
      if (colon == std::string_view::npos) break;
      start = colon + 1;
    }
    return v;
  };
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto bar = rest.find('|');
    if ((bar == std::string_view::npos) != (i + 1 == f.size())) {
      throw parameter_error("index '" + std::string(text) + "' does not match pair " +
                            pair.to_string());
    }
    const auto v = ints(rest.substr(0, bar));
    if (bar != std::string_view::npos) rest.remove_prefix(bar + 1);
    if (std::holds_alternative<RealSphere>(f[i])) {
      if (v.size() != 1) throw parameter_error("index '" + std::string(text) + "': real part needs n");
      idx.parts.push_back(RealIndex{v[0]});
    } else if (std::holds_alternative<ComplexSphere>(f[i])) {
      if (v.size() != 2) throw parameter_error("index '" + std::string(text) + "': complex part needs m:n");
      idx.parts.push_back(ComplexIndex{v[0], v[1]});
    } else {
      idx.parts.push_back(TorusIndex{v});
    }
  }
  check_index(pair, idx);
  return idx;
}

// Degree used for quadrature exactness bookkeeping: n, m+n, max|k_i|, and the
// maximum over product factors.
inline int index_degree(const SphericalIndex& idx) {
  int deg = 0;
  for (const auto& p : idx.parts) {
    std::visit(
        [&](const auto& q) {
          using T = std::decay_t<decltype(q)>;
          if constexpr (std::is_same_v<T, RealIndex>) {
            deg = std::max(deg, q.n);
          } else if constexpr (std::is_same_v<T, ComplexIndex>) {
            deg = std::max(deg, q.m + q.n);
          } else {
            for (int k : q.k) deg = std::max(deg, std::abs(k));
          }
        },
        p);
  }
  return deg;
}

namespace detail {

inline std::vector<FactorIndex> enumerate_factor(const PairFactor& f, int max_degree) {
  std::vector<FactorIndex> out;
  if (const auto* r = std::get_if<RealSphere>(&f)) {
    (void)r;
    for (int n = 0; n <= max_degree; ++n) out.push_back(RealIndex{n});
  } else if (std::holds_alternative<ComplexSphere>(f)) {
    for (int t = 0; t <= max_degree; ++t) {
      for (int m = t; m >= 0; --m) out.push_back(ComplexIndex{m, t - m});
    }
  } else {
    const int dims = std::get<TorusGroup>(f).n;
    for (int s = 0; s <= max_degree; ++s) {
      std::vector<int> k(static_cast<std::size_t>(dims), -s);
      while (true) {
        int mx = 0;
        for (int v : k) mx = std::max(mx, std::abs(v));
        if (mx == s) out.push_back(TorusIndex{k});
        int a = dims - 1;
        while (a >= 0 && k[static_cast<std::size_t>(a)] == s) {
          k[static_cast<std::size_t>(a)] = -s;
          --a;
        }
        if (a < 0) break;
        ++k[static_cast<std::size_t>(a)];
      }
    }
  }
  return out;
}

} // namespace detail

// Deterministic index order: real by n; complex by m+n ascending then m
// descending; torus by max-norm shell then lexicographically; products
// lexicographic over the factor orders (first factor outermost).
inline std::vector<SphericalIndex> enumerate_indices(const PairDescriptor& pair, int max_degree) {
  if (max_degree < 0) throw parameter_error("enumerate_indices: max_degree must be >= 0");
  std::vector<SphericalIndex> out{SphericalIndex{}};
  for (const auto& f : pair.factors()) {
    const auto fi = detail::enumerate_factor(f, max_degree);
    std::vector<SphericalIndex> next;
    next.reserve(out.size() * fi.size());
    for (const auto& prefix : out) {
      for (const auto& p : fi) {
        SphericalIndex s = prefix;
        s.parts.push_back(p);
        next.push_back(std::move(s));
      }
    }
    out = std::move(next);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Double-coset points

struct IntervalPoint {
  double t;
  friend bool operator==(const IntervalPoint&, const IntervalPoint&) = default;
};
struct DiscPoint {
  std::complex<double> z;
  friend bool operator==(const DiscPoint&, const DiscPoint&) = default;
};
struct AnglePoint {
  std::vector<double> x;
  friend bool operator==(const AnglePoint&, const AnglePoint&) = default;
};

using FactorPoint = std::variant<IntervalPoint, DiscPoint, AnglePoint>;

// Point of K\G/K: t in [-1,1], z in the closed disc, or an angle vector, one
// part per pair factor.
struct DoubleCosetPoint {
  std::vector<FactorPoint> parts;

  static DoubleCosetPoint interval(double t) { return {{IntervalPoint{t}}}; }
  static DoubleCosetPoint disc(std::complex<double> z) { return {{DiscPoint{z}}}; }
  static DoubleCosetPoint angles(std::vector<double> x) { return {{AnglePoint{std::move(x)}}}; }
  static DoubleCosetPoint product(const DoubleCosetPoint& a, const DoubleCosetPoint& b) {
    DoubleCosetPoint out = a;
    out.parts.insert(out.parts.end(), b.parts.begin(), b.parts.end());
    return out;
  }

  friend bool operator==(const DoubleCosetPoint&, const DoubleCosetPoint&) = default;
};

// The coset of the identity: t = 1, z = 1, x = 0.
inline DoubleCosetPoint identity_point(const PairDescriptor& pair) {
  DoubleCosetPoint p;
  for (const auto& f : pair.factors()) {
    if (std::holds_alternative<RealSphere>(f)) p.parts.push_back(IntervalPoint{1.0});
    else if (std::holds_alternative<ComplexSphere>(f)) p.parts.push_back(DiscPoint{{1.0, 0.0}});
    else p.parts.push_back(AnglePoint{std::vector<double>(static_cast<std::size_t>(std::get<TorusGroup>(f).n), 0.0)});
  }
  return p;
}

inline void check_point(const PairDescriptor& pair, const DoubleCosetPoint& p) {
  const auto& f = pair.factors();
  if (f.size() != p.parts.size()) {
    throw usage_error("point has " + std::to_string(p.parts.size()) + " parts, pair " +
                      pair.to_string() + " has " + std::to_string(f.size()) + " factors");
  }
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (std::holds_alternative<RealSphere>(f[i])) {
      const auto* q = std::get_if<IntervalPoint>(&p.parts[i]);
      if (!q) throw usage_error("point part " + std::to_string(i) + " must be an interval point");
      if (!(std::abs(q->t) <= 1.0 + tolerance::boundary)) {
        throw domain_error("interval point t = " + std::to_string(q->t) + " outside [-1, 1]");
      }
    } else if (std::holds_alternative<ComplexSphere>(f[i])) {
      const auto* q = std::get_if<DiscPoint>(&p.parts[i]);
      if (!q) throw usage_error("point part " + std::to_string(i) + " must be a disc point");
      if (!(std::abs(q->z) <= 1.0 + tolerance::boundary)) {
        throw domain_error("disc point |z| = " + std::to_string(std::abs(q->z)) + " exceeds 1");
      }
    } else {
      const auto* q = std::get_if<AnglePoint>(&p.parts[i]);
      if (!q || static_cast<int>(q->x.size()) != std::get<TorusGroup>(f[i]).n) {
        throw usage_error("point part " + std::to_string(i) + " must be an angle vector of length " +
                          std::to_string(std::get<TorusGroup>(f[i]).n));
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Spherical functions and dimensions

namespace detail {

inline std::complex<double> eval_factor(const PairFactor& f, const FactorIndex& idx,
                                        const FactorPoint& p) {
  if (const auto* rs = std::get_if<RealSphere>(&f)) {
    return gegenbauer_norm(std::get<RealIndex>(idx).n, rs->d, std::get<IntervalPoint>(p).t);
  }
  if (const auto* cs = std::get_if<ComplexSphere>(&f)) {
    const auto& ci = std::get<ComplexIndex>(idx);
    return disc_polynomial(ci.m, ci.n, cs->q - 2.0, std::get<DiscPoint>(p).z);
  }
  const auto& k = std::get<TorusIndex>(idx).k;
  const auto& x = std::get<AnglePoint>(p).x;
  double phase = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) phase += k[i] * x[i];
  return std::polar(1.0, phase);
}

} // namespace detail

// φ(point) for the spherical function φ = index of the pair.
inline std::complex<double> spherical_eval(const PairDescriptor& pair, const SphericalIndex& index,
                                           const DoubleCosetPoint& point) {
  check_index(pair, index);
  check_point(pair, point);
  std::complex<double> v{1.0, 0.0};
  for (std::size_t i = 0; i < pair.arity(); ++i) {
    v *= detail::eval_factor(pair.factors()[i], index.parts[i], point.parts[i]);
  }
  return v;
}

// δ(φ): N_n(d), N(q; m, n), 1 on the torus, and the product of the factor
// dimensions for product pairs.
inline std::uint64_t dimension(const PairDescriptor& pair, const SphericalIndex& index) {
  check_index(pair, index);
  detail::u128 v = 1;
  for (std::size_t i = 0; i < pair.arity(); ++i) {
    const auto& f = pair.factors()[i];
    std::uint64_t dim = 1;
    if (const auto* rs = std::get_if<RealSphere>(&f)) {
      dim = dimension_real(std::get<RealIndex>(index.parts[i]).n, rs->d);
    } else if (const auto* cs = std::get_if<ComplexSphere>(&f)) {
      const auto& ci = std::get<ComplexIndex>(index.parts[i]);
      dim = dimension_complex(cs->q, ci.m, ci.n);
    }
    v = detail::checked_mul(v, dim);
  }
  return detail::narrow_u64(v);
}

// ---------------------------------------------------------------------------
// Quadrature on the double-coset space

using FactorRule = std::variant<QuadratureRule, DiscQuadratureRule, TorusGrid>;

// Tensor-product rule, one factor rule per pair factor.
struct PairRule {
  std::vector<FactorRule> parts;
};

// Coefficient-extraction rule for indices of degree <= max_degree: Gauss rules
// of order max_degree + extra (exact for polynomial integrands up to degree
// 2*order-1, so any extra >= 1 covers products of two spherical functions),
// 2*order+1 angular points on discs, and the uniform torus grid with
// 2*max_degree+1 points per axis.
inline PairRule default_rule(const PairDescriptor& pair, int max_degree,
                             int extra = tolerance::extra_order) {
  if (max_degree < 0) throw parameter_error("default_rule: max_degree must be >= 0");
  if (max_degree + extra < 1) throw parameter_error("default_rule: order must be >= 1");
  const int order = max_degree + extra;
  PairRule rule;
  for (const auto& f : pair.factors()) {
    if (const auto* rs = std::get_if<RealSphere>(&f)) {
      rule.parts.push_back(sphere_rule(order, rs->d));
    } else if (const auto* cs = std::get_if<ComplexSphere>(&f)) {
      rule.parts.push_back(disc_rule(order, 2 * order + 1, cs->q));
    } else {
      rule.parts.push_back(torus_grid(std::get<TorusGroup>(f).n, 2 * max_degree + 1));
    }
  }
  return rule;
}

inline void check_rule(const PairDescriptor& pair, const PairRule& rule) {
  const auto& f = pair.factors();
  if (f.size() != rule.parts.size()) {
    throw usage_error("rule has " + std::to_string(rule.parts.size()) + " factors, pair " +
                      pair.to_string() + " has " + std::to_string(f.size()));
  }
  for (std::size_t i = 0; i < f.size(); ++i) {
    bool ok = false;
    if (const auto* rs = std::get_if<RealSphere>(&f[i])) {
      const auto* r = std::get_if<QuadratureRule>(&rule.parts[i]);
      const double a = rs->d / 2.0 - 1.0;
      ok = r && r->alpha == a && r->beta == a &&
           std::abs(total_mass(*r) - 1.0) <= 1e3 * tolerance::mass;
    } else if (const auto* cs = std::get_if<ComplexSphere>(&f[i])) {
      const auto* r = std::get_if<DiscQuadratureRule>(&rule.parts[i]);
      ok = r && r->q == cs->q;
    } else {
      const auto* r = std::get_if<TorusGrid>(&rule.parts[i]);
      ok = r && r->dims == std::get<TorusGroup>(f[i]).n;
    }
    if (!ok) {
      throw usage_error("rule factor " + std::to_string(i) + " is incompatible with pair " +
                        pair.to_string());
    }
  }
}

// Flattened tensor grid of a PairRule.
struct NodeSet {
  std::vector<DoubleCosetPoint> points;
  std::vector<double> weights;
};

inline NodeSet tensor_nodes(const PairRule& rule) {
  std::vector<std::vector<FactorPoint>> pts(rule.parts.size());
  std::vector<std::vector<double>> wts(rule.parts.size());
  for (std::size_t i = 0; i < rule.parts.size(); ++i) {
    std::visit(
        [&](const auto& r) {
          using T = std::decay_t<decltype(r)>;
          for (std::size_t j = 0; j < r.size(); ++j) {
            if constexpr (std::is_same_v<T, QuadratureRule>) pts[i].push_back(IntervalPoint{r.node(j)});
            else if constexpr (std::is_same_v<T, DiscQuadratureRule>) pts[i].push_back(DiscPoint{r.node(j)});
            else pts[i].push_back(AnglePoint{r.node(j)});
            wts[i].push_back(r.weight(j));
          }
        },
        rule.parts[i]);
  }
  NodeSet out{{DoubleCosetPoint{}}, {1.0}};
  for (std::size_t i = 0; i < pts.size(); ++i) {
    NodeSet next;
    next.points.reserve(out.points.size() * pts[i].size());
    next.weights.reserve(out.points.size() * pts[i].size());
    for (std::size_t a = 0; a < out.points.size(); ++a) {
      for (std::size_t b = 0; b < pts[i].size(); ++b) {
        DoubleCosetPoint p = out.points[a];
        p.parts.push_back(pts[i][b]);
        next.points.push_back(std::move(p));
        next.weights.push_back(out.weights[a] * wts[i][b]);
      }
    }
    out = std::move(next);
  }
  return out;
}

// Quadrature of ⟨φ₁, φ₂⟩ = ∫ φ₁ conj(φ₂) dω over the double-coset space.
inline std::complex<double> inner_product(const PairDescriptor& pair, const SphericalIndex& a,
                                          const SphericalIndex& b, const PairRule& rule) {
  check_rule(pair, rule);
  check_index(pair, a);
  check_index(pair, b);
  const auto nodes = tensor_nodes(rule);
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t i = 0; i < nodes.points.size(); ++i) {
    acc += nodes.weights[i] * spherical_eval(pair, a, nodes.points[i]) *
           std::conj(spherical_eval(pair, b, nodes.points[i]));
  }
  return acc;
}

// B(φ) = δ(φ) ∫ f conj(φ) dω, by quadrature. `f` maps DoubleCosetPoint to a
// complex (or real) value for one fixed group element.
template <class F>
std::complex<double> extract_coefficient(const PairDescriptor& pair, F&& f,
                                         const SphericalIndex& index, const PairRule& rule) {
  check_rule(pair, rule);
  check_index(pair, index);
  const auto nodes = tensor_nodes(rule);
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t i = 0; i < nodes.points.size(); ++i) {
    acc += nodes.weights[i] * std::complex<double>(f(nodes.points[i])) *
           std::conj(spherical_eval(pair, index, nodes.points[i]));
  }
  return static_cast<double>(dimension(pair, index)) * acc;
}

// Coefficient functions tabulated at finitely many group elements.
struct CoefficientTable {
  PairDescriptor pair = PairDescriptor::real_sphere(1);
  GroupDescriptor group;
  std::vector<SphericalIndex> indices;
  std::vector<GroupElement> u;
  // values[i][j] = B(indices[i])(u[j]).
  std::vector<std::vector<std::complex<double>>> values;
  // B(φ)(e_L) per index; empty for tables read back from CSV.
  std::vector<std::complex<double>> identity_values;
  // max over (φ, u) of |B(φ)(u)| - B(φ)(e_L); <= 0 up to quadrature error
  // when f is positive definite.
  double dominance_excess = 0.0;
};

// Tabulate B(φ)(u) for every φ in `indices` and u in `u_samples`. `f(point, u)`
// is a black box. f is evaluated once per (node, u); every table cell is an
// independent fixed-order sum.
template <class F>
CoefficientTable expand(const PairDescriptor& pair, const GroupDescriptor& group, F&& f,
                        std::vector<SphericalIndex> indices, std::vector<GroupElement> u_samples,
                        const PairRule& rule) {
  check_rule(pair, rule);
  for (const auto& idx : indices) check_index(pair, idx);
  for (const auto& u : u_samples) check_element(group, u);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (indices[i] == indices[j]) throw usage_error("expand: duplicate index " + indices[i].to_string());
    }
  }

  const auto nodes = tensor_nodes(rule);
  const std::size_t nn = nodes.points.size();

  std::vector<std::vector<std::complex<double>>> conj_phi(indices.size());
  std::vector<double> dims(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    dims[i] = static_cast<double>(dimension(pair, indices[i]));
    conj_phi[i].resize(nn);
    for (std::size_t p = 0; p < nn; ++p) {
      conj_phi[i][p] = std::conj(spherical_eval(pair, indices[i], nodes.points[p]));
    }
  }

  auto column = [&](const GroupElement& u) {
    std::vector<std::complex<double>> fv(nn);
    for (std::size_t p = 0; p < nn; ++p) fv[p] = std::complex<double>(f(nodes.points[p], u));
    std::vector<std::complex<double>> out(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) {
      std::complex<double> acc{0.0, 0.0};
      for (std::size_t p = 0; p < nn; ++p) acc += nodes.weights[p] * fv[p] * conj_phi[i][p];
      out[i] = dims[i] * acc;
    }
    return out;
  };

  CoefficientTable table;
  table.pair = pair;
  table.group = group;
  table.indices = indices;
  table.u = std::move(u_samples);
  table.values.assign(table.indices.size(), std::vector<std::complex<double>>(table.u.size()));
  for (std::size_t j = 0; j < table.u.size(); ++j) {
    const auto col = column(table.u[j]);
    for (std::size_t i = 0; i < col.size(); ++i) table.values[i][j] = col[i];
  }
  table.identity_values = column(identity_element(group));

  double excess = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < table.indices.size(); ++i) {
    for (std::size_t j = 0; j < table.u.size(); ++j) {
      excess = std::max(excess, std::abs(table.values[i][j]) - table.identity_values[i].real());
    }
  }
  table.dominance_excess = table.indices.empty() || table.u.empty() ? 0.0 : excess;
  return table;
}

// f(x, u) = Σ_j B_j(u) φ_j(x) rebuilt from a coefficient table at the table's
// own group sample u[column].
inline std::complex<double> synthesize(const CoefficientTable& table, const DoubleCosetPoint& point,
                                       std::size_t column) {
  if (column >= table.u.size()) throw usage_error("synthesize: table column out of range");
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t i = 0; i < table.indices.size(); ++i) {
    acc += table.values[i][column] * spherical_eval(table.pair, table.indices[i], point);
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Kernel specs

struct KernelTerm {
  SphericalIndex index;
  PDFunction coefficient;
};

struct KernelMeta {
  int truncation_degree = -1;
  std::map<std::string, std::string> params;
};

// Truncated expansion f(x, u) = Σ_terms B_φ(u) φ(x) with B_φ ∈ P(L).
class KernelSpec {
public:
  KernelSpec(PairDescriptor pair, GroupDescriptor group, std::vector<KernelTerm> terms,
             KernelMeta meta = {})
      : pair_(std::move(pair)), group_(group), terms_(std::move(terms)), meta_(std::move(meta)) {
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      check_index(pair_, terms_[i].index);
      if (!(terms_[i].coefficient.group() == group_)) {
        throw usage_error("kernel spec term " + terms_[i].index.to_string() +
                          ": coefficient lives on " + terms_[i].coefficient.group().to_string() +
                          ", spec group is " + group_.to_string());
      }
      for (std::size_t j = 0; j < i; ++j) {
        if (terms_[i].index == terms_[j].index) {
          throw usage_error("kernel spec: duplicate index " + terms_[i].index.to_string());
        }
      }
      identity_mass_ += terms_[i].coefficient.identity_value();
    }
    if (meta_.truncation_degree < 0) {
      for (const auto& t : terms_) {
        meta_.truncation_degree = std::max(meta_.truncation_degree, index_degree(t.index));
      }
    }
  }

  const PairDescriptor& pair() const noexcept { return pair_; }
  const GroupDescriptor& group() const noexcept { return group_; }
  const std::vector<KernelTerm>& terms() const noexcept { return terms_; }
  const KernelMeta& meta() const noexcept { return meta_; }
  // Σ B_φ(e_L) = f(identity, e_L).
  double identity_mass() const noexcept { return identity_mass_; }
  int max_degree() const noexcept { return std::max(0, meta_.truncation_degree); }

private:
  PairDescriptor pair_;
  GroupDescriptor group_;
  std::vector<KernelTerm> terms_;
  KernelMeta meta_;
  double identity_mass_ = 0.0;
};

inline std::complex<double> synthesize(const KernelSpec& spec, const DoubleCosetPoint& point,
                                       const GroupElement& u) {
  check_point(spec.pair(), point);
  check_element(spec.group(), u);
  std::complex<double> acc{0.0, 0.0};
  for (const auto& t : spec.terms()) {
    acc += t.coefficient(u) * spherical_eval(spec.pair(), t.index, point);
  }
  return acc;
}

// Uniform bound on the truncation error: full_mass - Σ B_φ(e_L), since
// |B_φ(u) φ(x)| <= B_φ(e_L) for every dropped term.
inline double tail_bound(const KernelSpec& spec, double full_mass) {
  const double tail = full_mass - spec.identity_mass();
  if (tail < -tolerance::tail_slack) {
    throw inconsistency_error("tail_bound: spec mass " + std::to_string(spec.identity_mass()) +
                              " exceeds the full mass " + std::to_string(full_mass));
  }
  return std::max(tail, 0.0);
}

// Same bound for an expansion tabulated by `expand`, using its B(φ)(e_L).
inline double tail_bound(const CoefficientTable& table, double full_mass) {
  double captured = 0.0;
  for (const auto& v : table.identity_values) captured += v.real();
  const double tail = full_mass - captured;
  if (tail < -tolerance::tail_slack) {
    throw inconsistency_error("tail_bound: extracted mass " + std::to_string(captured) +
                              " exceeds the full mass " + std::to_string(full_mass));
  }
  return std::max(tail, 0.0);
}

} // namespace gelfand
