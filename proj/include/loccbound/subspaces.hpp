#pragma once

// Subspace-level analytics: the maximal pure-state robustness inside a
// support, the minimal geometric measure, and product-spanned tests.
// The optimizer is multi-start projected gradient ascent on the unit sphere
// of subspace coefficients; found values are certified lower bounds on the
// true extrema (any iterate is a feasible point).

#include "loccbound/measures.hpp"
#include "loccbound/qla.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace loccbound {

struct SubspaceExtremum {
  PureState argmax;
  double value = 0.0;
  int starts = 0;
  bool converged = true;
  std::vector<double> perStartValues;
};

namespace detail {

// Objective over unit coefficient vectors c of a subspace basis: either the
// sum of singular values of the reshaped state (nuclear norm; its square is
// 1 + R) or the top singular value (whose square is the max product overlap).
// An optional quadratic penalty pushes iterates away from already-found
// directions during the product-vector search.
struct SphereProblem {
  BipartiteDims dims;
  std::vector<cmat> reshaped;  // reshaped basis vectors, dA x dB each
  bool nuclear = true;
  double mu = 0.0;
  cmat penalty;  // m x m Hermitian, sum of w w^dag over found directions

  explicit SphereProblem(const Subspace& S, bool nuclear_objective)
      : dims(S.dims()), nuclear(nuclear_objective) {
    const int m = S.dim();
    reshaped.reserve(m);
    for (int j = 0; j < m; ++j) {
      cmat M(dims.dA, dims.dB);
      for (int a = 0; a < dims.dA; ++a)
        for (int b = 0; b < dims.dB; ++b)
          M(a, b) = S.basis()(a * dims.dB + b, j);
      reshaped.push_back(std::move(M));
    }
    penalty = cmat::Zero(m, m);
  }

  cmat assemble(const cvec& c) const {
    cmat M = cmat::Zero(dims.dA, dims.dB);
    for (std::size_t j = 0; j < reshaped.size(); ++j) M += c(j) * reshaped[j];
    return M;
  }

  double sigma_sum(const cvec& c) const {
    Eigen::JacobiSVD<cmat> svd(assemble(c));
    return nuclear ? svd.singularValues().sum() : svd.singularValues()(0);
  }

  double value(const cvec& c) const {
    double v = sigma_sum(c);
    if (mu > 0.0) v -= mu * (c.dot(penalty * c)).real();
    return v;
  }

  // Returns the value; fills the ascent direction and flags a degenerate
  // singular spectrum (subgradient ambiguity).
  double value_and_grad(const cvec& c, cvec& grad, bool& degenerate) const {
    const cmat M = assemble(c);
    Eigen::JacobiSVD<cmat> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    degenerate = false;
    for (int i = 1; i < s.size(); ++i)
      if (std::abs(s(i - 1) - s(i)) < 1e-12) degenerate = true;
    cmat W;
    double v;
    if (nuclear) {
      W = svd.matrixU() * svd.matrixV().adjoint();
      v = s.sum();
    } else {
      W = svd.matrixU().col(0) * svd.matrixV().col(0).adjoint();
      v = s(0);
    }
    grad.resize(c.size());
    for (std::size_t j = 0; j < reshaped.size(); ++j)
      grad(j) = std::conj((W.adjoint() * reshaped[j]).trace());
    if (mu > 0.0) {
      v -= mu * (c.dot(penalty * c)).real();
      grad -= 2.0 * mu * (penalty * c);
    }
    return v;
  }
};

struct StartOutcome {
  cvec c;
  double value = 0.0;
  bool converged = false;
};

inline StartOutcome ascend(const SphereProblem& prob, cvec c, Rng& perturbRng,
                           int maxIter = 500, double improveTol = 1e-10) {
  StartOutcome out;
  c.normalize();
  cvec grad;
  bool degenerate = false;
  double f = prob.value_and_grad(c, grad, degenerate);
  double step = 1.0;
  for (int it = 0; it < maxIter; ++it) {
    if (degenerate) {
      cvec eta(c.size());
      for (int i = 0; i < eta.size(); ++i) eta(i) = perturbRng.cgauss();
      c = (c + 1e-12 * eta).normalized();
      f = prob.value_and_grad(c, grad, degenerate);
      degenerate = false;
    }
    if (grad.norm() < 1e-14) {
      out.converged = true;
      break;
    }
    bool improved = false;
    cvec cand;
    double fcand = f;
    while (step >= 1e-13) {
      cand = (c + step * grad).normalized();
      fcand = prob.value(cand);
      if (fcand > f) {
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) {
      out.converged = true;
      break;
    }
    const double rel = (fcand - f) / std::max(std::abs(f), 1e-12);
    c = cand;
    f = prob.value_and_grad(c, grad, degenerate);
    if (rel < improveTol) {
      out.converged = true;
      break;
    }
    step = std::min(step * 2.0, 1.0);
  }
  out.c = c;
  out.value = f;
  return out;
}

// Multi-start driver. Start points are drawn up front so that the sequence
// is independent of per-start work; ties keep the lowest start index.
inline std::vector<StartOutcome> multistart(const SphereProblem& prob, int m,
                                            int starts, std::uint64_t seed) {
  Rng master(seed);
  std::vector<cvec> inits;
  inits.reserve(starts);
  for (int s = 0; s < starts; ++s) inits.push_back(master.haar_vector(m));
  std::vector<StartOutcome> outcomes;
  outcomes.reserve(starts);
  for (int s = 0; s < starts; ++s) {
    Rng perturb(seed * 1000003ULL + static_cast<std::uint64_t>(s) + 1);
    outcomes.push_back(ascend(prob, inits[s], perturb));
  }
  return outcomes;
}

}  // namespace detail

/// Best value of (sum of Schmidt coefficients)^2 - 1 over unit vectors of S,
/// i.e. the maximal pure-state global robustness inside the subspace.
/// The result is a lower bound on the true maximum.
inline SubspaceExtremum max_robustness_in_subspace(const Subspace& S,
                                                   int starts = 64,
                                                   std::uint64_t seed = 1) {
  if (S.dim() < 1) throw validation_error("subspace must have dimension >= 1");
  if (S.dim() == 1) {
    auto psi = PureState::make(S.dims(), S.basis().col(0).normalized());
    const double r = robustness_pure(psi);
    return SubspaceExtremum{std::move(psi), r, 1, true, {r}};
  }
  detail::SphereProblem prob(S, /*nuclear=*/true);
  const auto outcomes = detail::multistart(prob, S.dim(), starts, seed);
  int best = 0;
  std::vector<double> values(outcomes.size());
  for (std::size_t s = 0; s < outcomes.size(); ++s) {
    values[s] = outcomes[s].value * outcomes[s].value - 1.0;
    if (outcomes[s].value > outcomes[best].value) best = static_cast<int>(s);
  }
  auto psi =
      PureState::make(S.dims(), (S.basis() * outcomes[best].c).normalized());
  const double value = robustness_pure(psi);  // re-measured at the argmax
  return SubspaceExtremum{std::move(psi), value, starts,
                          outcomes[best].converged, values};
}

/// Minimal geometric measure over unit vectors of S (0 iff the subspace
/// contains a product vector, within tolerance). Internally maximizes the
/// top singular value of the reshaped state.
inline SubspaceExtremum min_geometric_in_subspace(const Subspace& S,
                                                  int starts = 64,
                                                  std::uint64_t seed = 1) {
  if (S.dim() < 1) throw validation_error("subspace must have dimension >= 1");
  if (S.dim() == 1) {
    auto psi = PureState::make(S.dims(), S.basis().col(0).normalized());
    const double g = geometric_pure(psi);
    return SubspaceExtremum{std::move(psi), g, 1, true, {g}};
  }
  detail::SphereProblem prob(S, /*nuclear=*/false);
  const auto outcomes = detail::multistart(prob, S.dim(), starts, seed);
  int best = 0;
  std::vector<double> values(outcomes.size());
  for (std::size_t s = 0; s < outcomes.size(); ++s) {
    values[s] = -std::log2(outcomes[s].value * outcomes[s].value);
    if (outcomes[s].value > outcomes[best].value) best = static_cast<int>(s);
  }
  auto psi =
      PureState::make(S.dims(), (S.basis() * outcomes[best].c).normalized());
  const double value = geometric_pure(psi);
  return SubspaceExtremum{std::move(psi), value, starts,
                          outcomes[best].converged, values};
}

/// Product-vector content of a subspace.
struct ProductContent {
  std::vector<PureState> productVectors;  // deduplicated up to phase
  bool isProductSpanned = false;
  bool infinitelyMany = false;
  std::string method;  // "exact" | "numeric"
  bool converged = true;
};

namespace detail {

inline bool same_ray(const cvec& a, const cvec& b) {
  return std::abs(a.dot(b)) > 1.0 - 1e-8;
}

// Rank of the collected vectors at a fixed independence threshold.
inline int numeric_rank(const std::vector<cvec>& vs, int dim) {
  if (vs.empty()) return 0;
  cmat stack(dim, static_cast<int>(vs.size()));
  for (std::size_t i = 0; i < vs.size(); ++i) stack.col(static_cast<int>(i)) = vs[i];
  Eigen::JacobiSVD<cmat> svd(stack);
  int r = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > 1e-6) ++r;
  return r;
}

}  // namespace detail

/// Exact product vectors of a 2-dimensional subspace of a 2x2 system, via
/// the determinant pencil: v(t) = b1 + t b2 is product iff
/// det(M(b1) + t M(b2)) = 0, a quadratic in t (plus the t = infinity basis
/// direction). Yields at most two product directions unless the determinant
/// vanishes identically, in which case every vector is product.
inline ProductContent product_vectors_2x2(const Subspace& S) {
  if (!(S.dims() == BipartiteDims::make(2, 2)) || S.dim() != 2)
    throw validation_error("product_vectors_2x2 requires a 2-dim subspace of 2x2");
  ProductContent out;
  out.method = "exact";

  auto reshape = [](const cvec& v) {
    cmat M(2, 2);
    M << v(0), v(1), v(2), v(3);
    return M;
  };
  const cvec b1 = S.basis().col(0), b2 = S.basis().col(1);
  const cmat M1 = reshape(b1), M2 = reshape(b2);
  auto det2 = [](const cmat& M) { return M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0); };
  const cplx c0 = det2(M1);
  const cplx c2 = det2(M2);
  const cplx c1 = det2(M1 + M2) - c0 - c2;
  const double scale =
      std::max({std::abs(c0), std::abs(c1), std::abs(c2), 1e-30});
  const double eps = 1e-13 * std::max(1.0, scale);

  std::vector<cvec> dirs;
  if (std::abs(c0) < eps && std::abs(c1) < eps && std::abs(c2) < eps) {
    // determinant vanishes identically: every vector in S is product
    out.infinitelyMany = true;
    dirs.push_back(b1);
    dirs.push_back(b2);
  } else if (std::abs(c2) < eps) {
    if (std::abs(c1) >= eps) dirs.push_back((b1 - (c0 / c1) * b2).normalized());
    dirs.push_back(b2);  // t = infinity root
  } else {
    const cplx disc = c1 * c1 - 4.0 * c0 * c2;
    const cplx sq = std::sqrt(disc);
    // sign choice that avoids cancellation in -(c1 +- sq)/2
    const cplx q = (std::abs(c1 + sq) >= std::abs(c1 - sq)) ? -0.5 * (c1 + sq)
                                                            : -0.5 * (c1 - sq);
    if (std::abs(q) < eps) {
      const cplx r = std::sqrt(-c0 / c2);
      dirs.push_back((b1 + r * b2).normalized());
      dirs.push_back((b1 - r * b2).normalized());
    } else {
      dirs.push_back((b1 + (q / c2) * b2).normalized());
      dirs.push_back((b1 + (c0 / q) * b2).normalized());
    }
  }

  std::vector<cvec> kept;
  for (const auto& v : dirs) {
    const auto psi = PureState::make(S.dims(), v);
    if (geometric_pure(psi) > 1e-7) continue;  // root failed to verify
    bool dup = false;
    for (const auto& u : kept) dup = dup || detail::same_ray(u, v);
    if (!dup) {
      kept.push_back(v);
      out.productVectors.push_back(psi);
    }
  }
  out.isProductSpanned =
      out.infinitelyMany || detail::numeric_rank(kept, S.dims().D) >= S.dim();
  return out;
}

/// Product-spanned test. The 2x2/dim-2 case routes to the exact quadratic;
/// otherwise near-product vectors are collected by repeated penalized runs of
/// the minimal-geometric optimizer until dim(S) independent ones are found.
/// force_numeric skips the exact route (used to cross-validate the two).
inline ProductContent is_product_spanned(const Subspace& S, int starts = 64,
                                         std::uint64_t seed = 1,
                                         bool force_numeric = false) {
  if (!force_numeric && S.dims() == BipartiteDims::make(2, 2) && S.dim() == 2)
    return product_vectors_2x2(S);

  ProductContent out;
  out.method = "numeric";
  const int m = S.dim();
  // sigma1^2 >= 2^{-G} at G = 1e-7
  const double sigma_ok = std::sqrt(std::exp2(-1e-7));

  detail::SphereProblem prob(S, /*nuclear=*/false);
  std::vector<cvec> found;  // coefficient vectors
  bool anyConverged = true;
  for (int round = 0; round < m + 2; ++round) {
    prob.mu = (round == 0) ? 0.0 : 2.0;
    const auto outs =
        detail::multistart(prob, m, starts, seed + 7919ULL * round);
    anyConverged = false;
    for (const auto& o : outs) anyConverged = anyConverged || o.converged;
    for (const auto& o : outs) {
      if (prob.sigma_sum(o.c) < sigma_ok) continue;  // unpenalized readout
      bool dup = false;
      for (const auto& f : found) dup = dup || detail::same_ray(f, o.c);
      if (!dup) {
        found.push_back(o.c);
        prob.penalty += o.c * o.c.adjoint();
      }
    }
    if (detail::numeric_rank(found, m) >= m) break;
  }
  out.converged = anyConverged;
  for (const auto& c : found)
    out.productVectors.push_back(
        PureState::make(S.dims(), (S.basis() * c).normalized()));
  out.isProductSpanned = detail::numeric_rank(found, m) >= m;
  return out;
}

}  // namespace loccbound
