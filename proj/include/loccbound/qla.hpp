#pragma once

#include "loccbound/core.hpp"

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

namespace loccbound {

enum class Subsystem { A, B };

/// Schmidt data of a bipartite pure state. `coefficients` are the squared
/// Schmidt coefficients (a probability vector, descending); the state is
/// sum_k sqrt(lambda_k) leftBasis_k (x) rightBasis_k.
struct SchmidtData {
  rvec coefficients;
  std::vector<cvec> leftBasis;
  std::vector<cvec> rightBasis;
};

namespace detail {

inline void check_finite(const cmat& m, const std::string& what) {
  if (!m.allFinite())
    throw validation_error(what + " contains non-finite entries");
}

// Lexicographic order on complex vectors, real part before imaginary part.
inline bool lex_less(const cvec& a, const cvec& b) {
  for (int i = 0; i < a.size(); ++i) {
    if (a(i).real() != b(i).real()) return a(i).real() < b(i).real();
    if (a(i).imag() != b(i).imag()) return a(i).imag() < b(i).imag();
  }
  return false;
}

// Rotate the global phase so the first entry with significant magnitude is
// real and positive. Unit vectors always have such an entry.
inline cplx canonical_phase_factor(const cvec& v) {
  for (int i = 0; i < v.size(); ++i) {
    const double a = std::abs(v(i));
    if (a > 1e-8) return std::conj(v(i)) / a;
  }
  return {1.0, 0.0};
}

}  // namespace detail

/// Hermitian eigendecomposition with a reproducible output order:
/// eigenvalues descending, eigenvector phases canonicalized, exact ties
/// broken lexicographically on the eigenvector entries.
struct HermEig {
  rvec values;
  cmat vectors;  // column k pairs with values(k)
};

inline HermEig eig_desc(const cmat& H) {
  detail::check_finite(H, "matrix");
  Eigen::SelfAdjointEigenSolver<cmat> es(((H + H.adjoint()) * 0.5).eval());
  const int n = static_cast<int>(H.rows());
  HermEig out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (int i = 0; i < n; ++i) {
    out.values(i) = es.eigenvalues()(n - 1 - i);
    cvec v = es.eigenvectors().col(n - 1 - i);
    v *= detail::canonical_phase_factor(v);
    out.vectors.col(i) = v;
  }
  // tie groups: consecutive eigenvalues equal within 1e-12 of scale
  const double scale = std::max(1.0, std::abs(out.values(0)));
  int i = 0;
  while (i < n) {
    int j = i + 1;
    while (j < n && out.values(i) - out.values(j) <= 1e-12 * scale) ++j;
    if (j - i > 1) {
      std::vector<int> idx(j - i);
      for (int k = 0; k < j - i; ++k) idx[k] = i + k;
      std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        return detail::lex_less(out.vectors.col(a), out.vectors.col(b));
      });
      cmat block(n, j - i);
      rvec vals(j - i);
      for (int k = 0; k < j - i; ++k) {
        block.col(k) = out.vectors.col(idx[k]);
        vals(k) = out.values(idx[k]);
      }
      out.vectors.middleCols(i, j - i) = block;
      out.values.segment(i, j - i) = vals;
    }
    i = j;
  }
  return out;
}

/// Positive semidefinite unit-trace operator on a dA (x) dB space.
class DensityMatrix {
 public:
  static DensityMatrix make(BipartiteDims dims, cmat mat,
                            const Tolerances& tol = {}, int state_index = -1) {
    if (mat.rows() != dims.D || mat.cols() != dims.D)
      throw validation_error("density matrix must be " +
                                 std::to_string(dims.D) + "x" +
                                 std::to_string(dims.D),
                             state_index);
    detail::check_finite(mat, "density matrix");
    const double herm = (mat - mat.adjoint()).cwiseAbs().maxCoeff();
    if (herm > tol.herm)
      throw validation_error("density matrix is not Hermitian (deviation " +
                                 std::to_string(herm) + ")",
                             state_index, "tol_herm");
    const double tr_err = std::abs(mat.trace() - cplx(1.0, 0.0));
    if (tr_err > tol.trace)
      throw validation_error("density matrix trace deviates from 1 by " +
                                 std::to_string(tr_err),
                             state_index, "tol_trace");
    Eigen::SelfAdjointEigenSolver<cmat> es(((mat + mat.adjoint()) * 0.5).eval());
    if (es.eigenvalues()(0) < -tol.psd)
      throw validation_error("density matrix has eigenvalue " +
                                 std::to_string(es.eigenvalues()(0)),
                             state_index, "tol_psd");
    return DensityMatrix(dims, std::move(mat));
  }

  const BipartiteDims& dims() const { return dims_; }
  const cmat& mat() const { return mat_; }

 private:
  DensityMatrix(BipartiteDims dims, cmat mat)
      : dims_(dims), mat_(std::move(mat)) {}

  BipartiteDims dims_;
  cmat mat_;
};

class PureState;
SchmidtData schmidt_decompose(const PureState& psi);

/// Unit vector on a dA (x) dB space with eagerly computed Schmidt data.
class PureState {
 public:
  static PureState make(BipartiteDims dims, cvec vec,
                        const Tolerances& tol = {}) {
    if (vec.size() != dims.D)
      throw validation_error("state vector must have length " +
                             std::to_string(dims.D));
    if (!vec.allFinite())
      throw validation_error("state vector contains non-finite entries");
    const double n = vec.norm();
    if (n < 1e-12) throw validation_error("zero vector is not a state");
    if (std::abs(n - 1.0) > tol.norm)
      throw validation_error("state vector norm deviates from 1 by " +
                                 std::to_string(std::abs(n - 1.0)),
                             -1, "tol_norm");
    PureState psi(dims, std::move(vec));
    psi.schmidt_ = schmidt_decompose(psi);
    return psi;
  }

  const BipartiteDims& dims() const { return dims_; }
  const cvec& vec() const { return vec_; }
  const SchmidtData& schmidt() const { return schmidt_; }

  DensityMatrix projector(const Tolerances& tol = {}) const {
    return DensityMatrix::make(dims_, vec_ * vec_.adjoint(), tol);
  }

 private:
  PureState(BipartiteDims dims, cvec vec)
      : dims_(dims), vec_(std::move(vec)) {}

  BipartiteDims dims_;
  cvec vec_;
  SchmidtData schmidt_;

  friend SchmidtData schmidt_decompose(const PureState&);
};

/// Subspace of the composite space, stored as orthonormal basis columns.
class Subspace {
 public:
  static Subspace make(BipartiteDims dims, cmat basis,
                       const Tolerances& tol = {}) {
    if (basis.rows() != dims.D || basis.cols() < 1)
      throw validation_error("subspace basis must be D x m with m >= 1");
    detail::check_finite(basis, "subspace basis");
    const cmat gram = basis.adjoint() * basis;
    const double dev =
        (gram - cmat::Identity(basis.cols(), basis.cols())).cwiseAbs().maxCoeff();
    if (dev > tol.orth)
      throw validation_error("subspace basis is not orthonormal (Gram deviation " +
                                 std::to_string(dev) + ")",
                             -1, "tol_orth");
    return Subspace(dims, std::move(basis));
  }

  const BipartiteDims& dims() const { return dims_; }
  const cmat& basis() const { return basis_; }
  int dim() const { return static_cast<int>(basis_.cols()); }

  cmat projector() const { return basis_ * basis_.adjoint(); }

  /// Norm of the component of v outside the subspace.
  double residual_of(const cvec& v) const {
    return (v - basis_ * (basis_.adjoint() * v)).norm();
  }

 private:
  Subspace(BipartiteDims dims, cmat basis)
      : dims_(dims), basis_(std::move(basis)) {}

  BipartiteDims dims_;
  cmat basis_;
};

/// Kronecker product, a's indices major.
inline cmat tensor(const cmat& a, const cmat& b) {
  cmat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline cvec tensor(const cvec& a, const cvec& b) {
  cvec out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i)
    out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

/// Reduced operator on the kept subsystem; trace is preserved.
inline cmat partial_trace(const cmat& M, BipartiteDims dims, Subsystem traced) {
  if (M.rows() != dims.D || M.cols() != dims.D)
    throw validation_error("partial_trace: operator must be D x D");
  if (traced == Subsystem::B) {
    cmat out = cmat::Zero(dims.dA, dims.dA);
    for (int a = 0; a < dims.dA; ++a)
      for (int a2 = 0; a2 < dims.dA; ++a2)
        for (int b = 0; b < dims.dB; ++b)
          out(a, a2) += M(a * dims.dB + b, a2 * dims.dB + b);
    return out;
  }
  if (traced == Subsystem::A) {
    cmat out = cmat::Zero(dims.dB, dims.dB);
    for (int b = 0; b < dims.dB; ++b)
      for (int b2 = 0; b2 < dims.dB; ++b2)
        for (int a = 0; a < dims.dA; ++a)
          out(b, b2) += M(a * dims.dB + b, a * dims.dB + b2);
    return out;
  }
  throw validation_error("partial_trace: invalid subsystem tag");
}

inline cmat partial_trace(const DensityMatrix& rho, Subsystem traced) {
  return partial_trace(rho.mat(), rho.dims(), traced);
}

/// Transpose on the B factor. An involution; preserves Hermiticity and trace.
inline cmat partial_transpose(const cmat& M, BipartiteDims dims) {
  if (M.rows() != dims.D || M.cols() != dims.D)
    throw validation_error("partial_transpose: operator must be D x D");
  cmat out(dims.D, dims.D);
  for (int a = 0; a < dims.dA; ++a)
    for (int a2 = 0; a2 < dims.dA; ++a2)
      for (int b = 0; b < dims.dB; ++b)
        for (int b2 = 0; b2 < dims.dB; ++b2)
          out(a * dims.dB + b, a2 * dims.dB + b2) =
              M(a * dims.dB + b2, a2 * dims.dB + b);
  return out;
}

/// Schmidt decomposition via SVD of the dA x dB coefficient matrix.
/// Ordering is deterministic: descending squared coefficients, ties broken
/// lexicographically on the left vectors, phases canonicalized.
inline SchmidtData schmidt_decompose(const PureState& psi) {
  const auto& d = psi.dims();
  cmat C(d.dA, d.dB);
  for (int a = 0; a < d.dA; ++a)
    for (int b = 0; b < d.dB; ++b) C(a, b) = psi.vec()(a * d.dB + b);
  Eigen::JacobiSVD<cmat> svd(C, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const int k = static_cast<int>(svd.singularValues().size());

  struct Term {
    double lambda;
    cvec left, right;
  };
  std::vector<Term> terms;
  terms.reserve(k);
  for (int i = 0; i < k; ++i) {
    const double s = svd.singularValues()(i);
    const double lam = s * s;
    if (lam <= 1e-12 && !terms.empty()) continue;  // drop numerically-zero tail
    cvec u = svd.matrixU().col(i);
    cvec v = svd.matrixV().col(i);
    const cplx c = detail::canonical_phase_factor(u);
    u *= c;
    v *= c;
    terms.push_back({lam, std::move(u), v.conjugate()});
  }
  // singular values arrive descending from Eigen; enforce the tie-break
  std::stable_sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) {
    if (std::abs(a.lambda - b.lambda) > 1e-12) return a.lambda > b.lambda;
    return detail::lex_less(a.left, b.left);
  });

  SchmidtData out;
  out.coefficients.resize(static_cast<int>(terms.size()));
  for (std::size_t i = 0; i < terms.size(); ++i) {
    out.coefficients(static_cast<int>(i)) = terms[i].lambda;
    out.leftBasis.push_back(std::move(terms[i].left));
    out.rightBasis.push_back(std::move(terms[i].right));
  }
  return out;
}

/// Reassemble sum_k sqrt(lambda_k) u_k (x) v_k; used by invariant checks.
inline cvec schmidt_reconstruct(const SchmidtData& sd, BipartiteDims dims) {
  cvec out = cvec::Zero(dims.D);
  for (std::size_t k = 0; k < sd.leftBasis.size(); ++k)
    out += std::sqrt(sd.coefficients(static_cast<int>(k))) *
           tensor(sd.leftBasis[k], sd.rightBasis[k]);
  return out;
}

/// Subspace spanned by eigenvectors with eigenvalue > rank_tol * max.
inline Subspace support_projector(const DensityMatrix& sigma,
                                  double rank_tol = 1e-9) {
  const HermEig eig = eig_desc(sigma.mat());
  const double cutoff = rank_tol * eig.values(0);
  int r = 0;
  while (r < eig.values.size() && eig.values(r) > cutoff) ++r;
  Tolerances tol;
  tol.orth = 1e-8;  // eigenvector orthogonality at solver precision
  return Subspace::make(sigma.dims(), eig.vectors.leftCols(r), tol);
}

/// True iff max_{i != j} Tr(sigma_i sigma_j) <= tol.
inline bool mutually_orthogonal(const std::vector<DensityMatrix>& states,
                                double tol = 1e-8) {
  for (std::size_t i = 0; i < states.size(); ++i)
    if (!(states[i].dims() == states[0].dims()))
      throw validation_error("mutually_orthogonal: dimension mismatch",
                             static_cast<int>(i));
  for (std::size_t i = 0; i < states.size(); ++i) {
    for (std::size_t j = i + 1; j < states.size(); ++j) {
      const double overlap =
          std::abs((states[i].mat() * states[j].mat()).trace());
      if (overlap > tol) return false;
    }
  }
  return true;
}

}  // namespace loccbound
