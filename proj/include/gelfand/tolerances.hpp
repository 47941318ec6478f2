#pragma once

namespace gelfand::tolerance {

// Boundary slack for |x| <= 1 and |z| <= 1 membership tests. Quadrature nodes
// and normalized inner products land a few ulps outside the closed domain.
inline constexpr double boundary = 1e-12;

// Relative exactness of Gauss-Jacobi rules on polynomials of degree <= 2k-1.
inline constexpr double exactness = 1e-12;

// Total-mass identity for the probability-normalized sphere and disc rules.
inline constexpr double mass = 1e-13;

// Entrywise hermitian defect accepted by the eigen routines.
inline constexpr double hermitian = 1e-12;

// tail_bound tolerates this much negative slack before reporting an
// inconsistency.
inline constexpr double tail_slack = 1e-9;

// Default Gram PSD tolerance is psd_per_point * n for an n x n matrix.
inline constexpr double psd_per_point = 1e-9;

// Field simulation: indefiniteness beyond this (times the mean variance) is a
// refusal; jitter is jitter_scale * trace / n.
inline constexpr double jitter_budget = 1e-8;
inline constexpr double jitter_scale = 1e-10;

// Coefficient extraction uses a rule of order max_degree + extra_order.
inline constexpr int extra_order = 8;

} // namespace gelfand::tolerance
