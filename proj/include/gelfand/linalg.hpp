#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "errors.hpp"
#include "tolerances.hpp"

namespace gelfand {

using cmatrix = Eigen::MatrixXcd;
using cvector = Eigen::VectorXcd;

// Largest entrywise |m(j,k) - conj(m(k,j))|.
inline double hermitian_defect(const cmatrix& m) {
  if (m.rows() != m.cols()) throw usage_error("hermitian_defect: matrix is not square");
  double worst = 0.0;
  for (Eigen::Index j = 0; j < m.rows(); ++j) {
    for (Eigen::Index k = j; k < m.cols(); ++k) {
      worst = std::max(worst, std::abs(m(j, k) - std::conj(m(k, j))));
    }
  }
  return worst;
}

// Smallest eigenvalue of a hermitian matrix. The defect tolerance is relative
// to the largest entry (absolute for matrices with entries below 1).
inline double min_eigen_hermitian(const cmatrix& m) {
  if (m.rows() == 0) throw usage_error("min_eigen_hermitian: empty matrix");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double defect = hermitian_defect(m);
  if (defect > tolerance::hermitian * scale) {
    throw usage_error("min_eigen_hermitian: matrix is not hermitian (defect " +
                      std::to_string(defect) + ")");
  }
  Eigen::SelfAdjointEigenSolver<cmatrix> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw numeric_error("min_eigen_hermitian: eigensolve did not converge");
  }
  return solver.eigenvalues().minCoeff();
}

// Outcome of a finite-subset positive semidefiniteness test.
struct GramReport {
  int size = 0;
  double min_eigenvalue = 0.0;
  double tolerance = 0.0;
  bool pass = true;
  std::uint64_t seed = 0;
  int trials = 0;
  // Trial that produced min_eigenvalue, and the derived seed that regenerates
  // its point set.
  int worst_trial = 0;
  std::uint64_t worst_trial_seed = 0;

  void record(int trial, std::uint64_t trial_seed, double lambda) {
    if (trials == 0 || lambda < min_eigenvalue) {
      min_eigenvalue = lambda;
      worst_trial = trial;
      worst_trial_seed = trial_seed;
    }
    ++trials;
    pass = min_eigenvalue >= -tolerance;
  }
};

} // namespace gelfand
