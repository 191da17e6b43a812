#pragma once

// Shared constructions for the test suites. Oracles in here must stay
// independent of the library code paths they are used to check: they work
// directly on Eigen objects.

#include "loccbound/core.hpp"
#include "loccbound/qla.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <vector>

namespace testutil {

using loccbound::BipartiteDims;
using loccbound::cmat;
using loccbound::cplx;
using loccbound::cvec;
using loccbound::DensityMatrix;
using loccbound::PureState;
using loccbound::Rng;

inline cvec ket(int i, int d) {
  cvec v = cvec::Zero(d);
  v(i) = 1.0;
  return v;
}

// Computational-basis product ket |ab> in dA (x) dB.
inline cvec ket2(int a, int b, BipartiteDims dims) {
  cvec v = cvec::Zero(dims.D);
  v(a * dims.dB + b) = 1.0;
  return v;
}

inline BipartiteDims qubits() { return BipartiteDims::make(2, 2); }

inline cvec bell_phi_plus() {
  cvec v = cvec::Zero(4);
  v(0) = v(3) = 1.0 / std::sqrt(2.0);
  return v;
}

inline cvec bell_phi_minus() {
  cvec v = cvec::Zero(4);
  v(0) = 1.0 / std::sqrt(2.0);
  v(3) = -1.0 / std::sqrt(2.0);
  return v;
}

inline cvec bell_psi_plus() {
  cvec v = cvec::Zero(4);
  v(1) = v(2) = 1.0 / std::sqrt(2.0);
  return v;
}

inline cvec bell_psi_minus() {
  cvec v = cvec::Zero(4);
  v(1) = 1.0 / std::sqrt(2.0);
  v(2) = -1.0 / std::sqrt(2.0);
  return v;
}

inline std::vector<cvec> bell_states() {
  return {bell_phi_plus(), bell_phi_minus(), bell_psi_plus(), bell_psi_minus()};
}

// Random density matrix with full rank: G G^dag / Tr.
inline cmat random_density(Rng& rng, int d) {
  cmat g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = rng.cgauss();
  cmat rho = g * g.adjoint();
  rho /= rho.trace();
  return rho;
}

// Random mixed state supported on the span of the given orthonormal columns.
inline cmat random_density_on(Rng& rng, const cmat& basis) {
  const int m = static_cast<int>(basis.cols());
  const cmat block = random_density(rng, m);
  return basis * block * basis.adjoint();
}

// ---------------------------------------------------------------------------
// Oracles (independent of the library implementation paths)

// Squared Schmidt coefficients of a vector, via direct SVD of the reshaped
// coefficient matrix.
inline Eigen::VectorXd schmidt_lambdas_oracle(const cvec& v, BipartiteDims dims) {
  cmat C(dims.dA, dims.dB);
  for (int a = 0; a < dims.dA; ++a)
    for (int b = 0; b < dims.dB; ++b) C(a, b) = v(a * dims.dB + b);
  Eigen::JacobiSVD<cmat> svd(C);
  Eigen::VectorXd l = svd.singularValues().array().square();
  return l;
}

// Closed-form global robustness of a pure bipartite state.
inline double robustness_closed_form(const cvec& v, BipartiteDims dims) {
  cmat C(dims.dA, dims.dB);
  for (int a = 0; a < dims.dA; ++a)
    for (int b = 0; b < dims.dB; ++b) C(a, b) = v(a * dims.dB + b);
  Eigen::JacobiSVD<cmat> svd(C);
  const double s = svd.singularValues().sum();
  return s * s - 1.0;
}

// Brute-force grid for max over psi(theta, phi) = cos theta |00> +
// e^{i phi} sin theta |11> of (sum of Schmidt coefficients)^2 - 1.
inline double grid_max_robustness_00_11(int n_theta = 2001) {
  double best = 0.0;
  for (int i = 0; i < n_theta; ++i) {
    const double th = 0.5 * M_PI * i / (n_theta - 1);
    const double c = std::cos(th), s = std::sin(th);
    const double val = (c + s) * (c + s) - 1.0;  // phases do not change lambdas
    best = std::max(best, val);
  }
  return best;
}

// Grid maximization of the squared product-state overlap of a 2x2-space
// vector; returns max |<a (x) b | psi>|^2.
inline double grid_max_product_overlap_2x2(const cvec& psi, int n = 60) {
  double best = 0.0;
  for (int ia = 0; ia <= n; ++ia) {
    const double ta = M_PI * ia / (2.0 * n);
    for (int pa = 0; pa < 2 * n; ++pa) {
      const double fa = 2.0 * M_PI * pa / (2.0 * n);
      const cvec a = (cvec(2) << std::cos(ta),
                      std::polar(std::sin(ta), fa)).finished();
      // best b for fixed a is the normalized conditional vector
      cvec cond = cvec::Zero(2);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) cond(j) += std::conj(a(i)) * psi(2 * i + j);
      best = std::max(best, cond.squaredNorm());
    }
  }
  return best;
}

}  // namespace testutil
