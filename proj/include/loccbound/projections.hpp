#pragma once

// Projection primitives for the alternating-projection feasibility solvers.

#include "loccbound/core.hpp"

#include <algorithm>
#include <limits>

namespace loccbound::detail {

inline double min_eigenvalue(const cmat& H) {
  Eigen::SelfAdjointEigenSolver<cmat> es(((H + H.adjoint()) * 0.5).eval(),
                                         Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

/// Frobenius projection onto the PSD cone: clamp negative eigenvalues.
inline cmat project_psd(const cmat& H) {
  Eigen::SelfAdjointEigenSolver<cmat> es(((H + H.adjoint()) * 0.5).eval());
  const rvec clamped = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * clamped.asDiagonal() *
         es.eigenvectors().adjoint();
}

/// Euclidean projection of p onto {q : 0 <= q_i <= cap, sum q = total} by
/// waterfilling; requires n*cap >= total.
inline rvec project_capped_simplex(const rvec& p, double total, double cap) {
  const int n = static_cast<int>(p.size());
  const double eff = std::min(cap, total);  // entries can never exceed total
  auto mass = [&](double theta) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      s += std::clamp(p(i) - theta, 0.0, eff);
    return s;
  };
  double lo = p.minCoeff() - eff - 1.0;  // mass(lo) = n*eff >= total
  double hi = p.maxCoeff();              // mass(hi) = 0
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (mass(mid) >= total ? lo : hi) = mid;
  }
  rvec q(n);
  const double theta = 0.5 * (lo + hi);
  for (int i = 0; i < n; ++i) q(i) = std::clamp(p(i) - theta, 0.0, eff);
  return q;
}

/// Projection onto {X ⪰ 0, Tr X = 1, eigenvalues <= cap}: eigenvalues go
/// through the capped simplex, eigenvectors are kept.
inline cmat project_density(const cmat& H,
                            double cap = std::numeric_limits<double>::infinity()) {
  Eigen::SelfAdjointEigenSolver<cmat> es(((H + H.adjoint()) * 0.5).eval());
  const rvec q = project_capped_simplex(es.eigenvalues(), 1.0, cap);
  return es.eigenvectors() * q.asDiagonal() * es.eigenvectors().adjoint();
}

/// Shared knobs of the inner alternating-projection feasibility solves.
struct PocsParams {
  double residTol = 1e-8;
  int maxIter = 5000;
  int plateauWindow = 500;
  double plateauRelImprove = 1e-12;
};

struct PocsOutcome {
  bool feasible = false;
  double residual = 0.0;
  int iterations = 0;
};

}  // namespace loccbound::detail
