#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace loccbound {

using cplx = std::complex<double>;
using cmat = Eigen::MatrixXcd;
using cvec = Eigen::VectorXcd;
using rvec = Eigen::VectorXd;

/// Local dimensions of the two parties; D = dA*dB is the composite dimension.
struct BipartiteDims {
  int dA = 2;
  int dB = 2;
  int D = 4;

  static BipartiteDims make(int dA, int dB);

  friend bool operator==(const BipartiteDims&, const BipartiteDims&) = default;
};

/// Validation tolerances shared across modules. Defaults sized for double
/// precision at composite dimensions <= 36.
struct Tolerances {
  double herm = 1e-9;
  double psd = 1e-9;
  double trace = 1e-9;
  double norm = 1e-9;
  double recon = 1e-10;
  double orth = 1e-10;
  double rank = 1e-9;           // relative to the largest eigenvalue
  double ensemble_orth = 1e-8;  // max |Tr(sigma_i sigma_j)|, i != j
};

/// Raised on malformed inputs: shape errors, schema errors, physics
/// violations (non-PSD, trace != 1, non-orthogonal ensembles, ...).
class validation_error : public std::runtime_error {
 public:
  explicit validation_error(const std::string& msg, int state_index = -1,
                            std::string tolerance_name = {})
      : std::runtime_error(msg),
        state_index_(state_index),
        tolerance_name_(std::move(tolerance_name)) {}

  int state_index() const { return state_index_; }
  const std::string& tolerance_name() const { return tolerance_name_; }

 private:
  int state_index_;
  std::string tolerance_name_;
};

/// Raised when an iterative solver exhausts its budget without reaching a
/// usable answer; carries the last bracket for diagnosis.
class solver_error : public std::runtime_error {
 public:
  solver_error(const std::string& msg, double lo, double hi)
      : std::runtime_error(msg), lo_(lo), hi_(hi) {}

  double bracket_lo() const { return lo_; }
  double bracket_hi() const { return hi_; }

 private:
  double lo_;
  double hi_;
};

/// Deterministic random source. Uniform and Gaussian variates are generated
/// by hand from the raw mt19937_64 stream so that results do not depend on
/// standard-library distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  /// Uniform double in [0, 1).
  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  cplx cgauss() {
    const double re = gaussian();
    const double im = gaussian();
    return {re, im};
  }

  /// Haar-random unit vector in C^n.
  cvec haar_vector(int n) {
    cvec v(n);
    for (int i = 0; i < n; ++i) v(i) = cgauss();
    v.normalize();
    return v;
  }

  /// Haar-random unitary: QR of a Ginibre matrix with the R diagonal phases
  /// absorbed into Q.
  cmat haar_unitary(int n) {
    cmat g(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) g(i, j) = cgauss();
    Eigen::HouseholderQR<cmat> qr(g);
    cmat q = qr.householderQ();
    const cmat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j) {
      const cplx d = r(j, j);
      const double ad = std::abs(d);
      q.col(j) *= (ad > 0.0) ? d / ad : cplx(1.0, 0.0);
    }
    return q;
  }

  std::uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

inline BipartiteDims BipartiteDims::make(int dA, int dB) {
  if (dA < 2 || dB < 2)
    throw validation_error("local dimensions must be >= 2, got " +
                           std::to_string(dA) + "x" + std::to_string(dB));
  return BipartiteDims{dA, dB, dA * dB};
}

}  // namespace loccbound
