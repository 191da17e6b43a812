#pragma once

// Entanglement and mixedness measures. Pure-state quantities use the exact
// Schmidt-spectrum formulas (base-2 logarithms throughout); the mixed-state
// global robustness is evaluated against the PPT relaxation of the separable
// set, so computed values are lower bounds on the true global robustness.

#include "loccbound/projections.hpp"
#include "loccbound/qla.hpp"

#include <cmath>

namespace loccbound {

/// Von Neumann entropy in bits; 0 log 0 := 0.
inline double vn_entropy(const DensityMatrix& sigma) {
  Eigen::SelfAdjointEigenSolver<cmat> es(sigma.mat(), Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    const double p = es.eigenvalues()(i);
    if (p > 1e-15) s -= p * std::log2(p);
  }
  return s;
}

/// Global robustness of a pure bipartite state, closed form
/// (sum_k sqrt(lambda_k))^2 - 1 over the squared Schmidt coefficients.
inline double robustness_pure(const PureState& psi) {
  const double s = psi.schmidt().coefficients.cwiseSqrt().sum();
  return s * s - 1.0;
}

/// Relative entropy of entanglement of a pure bipartite state: the entropy
/// of entanglement, -sum lambda log2 lambda.
inline double rel_entropy_pure(const PureState& psi) {
  const auto& lam = psi.schmidt().coefficients;
  double e = 0.0;
  for (int i = 0; i < lam.size(); ++i)
    if (lam(i) > 1e-15) e -= lam(i) * std::log2(lam(i));
  return e;
}

/// Geometric measure of a pure bipartite state: -log2 of the largest squared
/// Schmidt coefficient (the maximal product-state overlap).
inline double geometric_pure(const PureState& psi) {
  return -std::log2(psi.schmidt().coefficients(0));
}

struct PureMeasures {
  double R = 0.0;
  double E_R = 0.0;
  double G = 0.0;
};

inline PureMeasures pure_measures(const PureState& psi) {
  return {robustness_pure(psi), rel_entropy_pure(psi), geometric_pure(psi)};
}

struct RobustnessOptions {
  double bisectTol = 1e-5;
  double feasTol = 1e-8;   // inner residual threshold
  int maxIter = 5000;      // inner alternating-projection cap
  double psdTol = 1e-9;    // "already PPT" short circuit
};

struct RobustnessResult {
  double value = 0.0;
  bool converged = true;
  double lo = 0.0;  // bracket: lo infeasible (or 0), hi verified feasible
  double hi = 0.0;
  int feasibilitySolves = 0;
};

namespace detail {

/// One feasibility question of the robustness bisection: does a state rho
/// exist with PT(sigma) + t PT(rho) ⪰ 0? Alternating projections between
/// the density matrices and the affine-preimage of the PSD cone. rho is
/// used as warm start and left at the final iterate.
inline PocsOutcome rg_feasible(const cmat& sigmaPT, double t,
                               BipartiteDims dims, cmat& rho,
                               const PocsParams& par) {
  PocsOutcome out;
  double plateauRef = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= par.maxIter; ++k) {
    out.iterations = k;
    const cmat Z = sigmaPT + t * partial_transpose(rho, dims);
    const cmat Zp = project_psd(Z);
    const double resid = (Zp - Z).norm() / t;
    out.residual = resid;
    if (resid < par.residTol) {
      out.feasible = true;
      return out;
    }
    rho = project_density(
        (rho + partial_transpose(Zp - Z, dims) / t).eval());
    if (k % par.plateauWindow == 0) {
      if (plateauRef - resid < par.plateauRelImprove * plateauRef) return out;
      plateauRef = resid;
    }
  }
  return out;
}

}  // namespace detail

/// Smallest t (within bisectTol) such that some state rho makes
/// (sigma + t rho)/(1 + t) positive under partial transposition. This is the
/// global robustness with the separable set relaxed to the PPT set, hence a
/// lower bound on the true global robustness.
inline RobustnessResult global_robustness_ppt(const DensityMatrix& sigma,
                                              const RobustnessOptions& opt = {}) {
  const auto dims = sigma.dims();
  const cmat sigmaPT = partial_transpose(sigma.mat(), dims);
  const HermEig eig = eig_desc(sigmaPT);

  RobustnessResult res;
  if (eig.values(eig.values.size() - 1) >= -opt.psdTol) return res;  // PPT

  // Witness lower bound: for the projector W onto the negative eigenspace,
  // any feasible t satisfies t * lmax(PT(W)) >= |sum of negative eigenvalues|.
  double nu = 0.0;
  cmat W = cmat::Zero(dims.D, dims.D);
  for (int i = 0; i < eig.values.size(); ++i) {
    if (eig.values(i) < 0.0) {
      nu -= eig.values(i);
      W += eig.vectors.col(i) * eig.vectors.col(i).adjoint();
    }
  }
  Eigen::SelfAdjointEigenSolver<cmat> wpt(partial_transpose(W, dims),
                                          Eigen::EigenvaluesOnly);
  const double wmax = wpt.eigenvalues()(wpt.eigenvalues().size() - 1);

  double lo = (wmax > 0.0) ? nu / wmax : 0.0;
  double hi = static_cast<double>(dims.D);  // always feasible (rho = I/D)

  detail::PocsParams par;
  par.residTol = opt.feasTol;
  par.maxIter = opt.maxIter;
  cmat rho = cmat::Identity(dims.D, dims.D) / dims.D;
  while (hi - lo > opt.bisectTol) {
    const double t = 0.5 * (lo + hi);
    const auto out = detail::rg_feasible(sigmaPT, t, dims, rho, par);
    ++res.feasibilitySolves;
    (out.feasible ? hi : lo) = t;
  }
  res.value = hi;
  res.lo = lo;
  res.hi = hi;
  return res;
}

/// Mixedness-aware measures of Theorem-3 type.
struct MixedMeasures {
  double S = 0.0;        // von Neumann entropy, bits
  double R_g = 0.0;      // PPT lower bound on the global robustness
  double alpha = 0.0;    // maximum eigenvalue
  double calR = 0.0;     // alpha^{-1} (1 + R_g)
  bool solverUsed = false;
};

/// Populated MixedMeasures. Rank-1 inputs use the exact pure closed form for
/// the robustness; genuinely mixed inputs go through the PPT solver.
inline MixedMeasures mixed_measures(const DensityMatrix& sigma,
                                    const RobustnessOptions& opt = {},
                                    double rank_tol = 1e-9) {
  MixedMeasures m;
  m.S = vn_entropy(sigma);
  const HermEig eig = eig_desc(sigma.mat());
  m.alpha = eig.values(0);
  const int rank = [&] {
    int r = 0;
    while (r < eig.values.size() && eig.values(r) > rank_tol * eig.values(0))
      ++r;
    return r;
  }();
  if (rank == 1) {
    const auto psi = PureState::make(sigma.dims(), eig.vectors.col(0));
    m.R_g = robustness_pure(psi);
  } else {
    m.R_g = global_robustness_ppt(sigma, opt).value;
    m.solverUsed = true;
  }
  m.calR = (1.0 + m.R_g) / m.alpha;
  return m;
}

}  // namespace loccbound
