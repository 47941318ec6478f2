// Build a space-time covariance on S^2 x R, check it, expand it back and draw
// one realization of the field.

#include <cstdio>
#include <iostream>

#include <gelfand/gelfand.hpp>

int main() {
  using namespace gelfand;
  const auto pair = PairDescriptor::real_sphere(2);
  const auto time = GroupDescriptor::euclidean(1);

  // f(t, u) = Σ_n 2^{-n-1} exp(-(n+1)u²/4) c_n(2, t), n = 0..5
  std::vector<KernelTerm> terms;
  for (int n = 0; n <= 5; ++n) {
    terms.push_back({SphericalIndex::real(n),
                     PDFunction::scale(std::ldexp(1.0, -n - 1), PDFunction::gaussian(time, (n + 1) / 4.0))});
  }
  const KernelSpec spec(pair, time, terms);
  std::cout << "identity mass " << spec.identity_mass() << ", tail bound against 1: " << tail_bound(spec, 1.0)
            << "\n";

  const auto report = kernel_psd_check(spec_job(spec, 30, 50, 2024));
  std::printf("Gram check: min eigenvalue %.3e over %d trials -> %s\n", report.min_eigenvalue, report.trials,
              report.pass ? "pass" : "fail");

  // Recover B_n(u) at a few time lags from kernel values alone.
  const std::vector<GroupElement> lags{{{0.0}}, {{1.0}}, {{2.5}}};
  auto f = [&](const DoubleCosetPoint& p, const GroupElement& u) { return synthesize(spec, p, u); };
  const auto table = expand(pair, time, f, enumerate_indices(pair, 7), lags, default_rule(pair, 7));
  for (std::size_t i = 0; i < table.indices.size(); ++i) {
    std::printf("B_%s:", table.indices[i].to_string().c_str());
    for (std::size_t j = 0; j < lags.size(); ++j) std::printf(" % .6f", table.values[i][j].real());
    std::printf("\n");
  }

  const auto xi = sample_sphere_points(pair, 6, 7);
  std::vector<FieldPoint> pts;
  for (std::size_t i = 0; i < xi.size(); ++i) pts.push_back({xi[i], GroupElement{{0.5 * static_cast<double>(i)}}});
  const auto field = sample_field(spec, pts, 99);
  io::write_field_csv(std::cout, field);
  return report.pass ? 0 : 1;
}
