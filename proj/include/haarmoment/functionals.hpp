#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace haarmoment::functionals {

using Complex = std::complex<double>;
using Eigen::MatrixXcd;

// ---------------------------------------------------------------------------
// Observables and states.
// ---------------------------------------------------------------------------

struct Observable {
  MatrixXcd matrix;

  explicit Observable(MatrixXcd m) : matrix(std::move(m)) {
    if (matrix.rows() != matrix.cols())
      throw std::invalid_argument("observable must be square");
    const double scale = std::max(1.0, matrix.norm());
    if ((matrix - matrix.adjoint()).norm() > 1e-12 * scale)
      throw std::invalid_argument("observable is not Hermitian");
  }

  int d() const { return static_cast<int>(matrix.rows()); }

  static Observable identity(int d) {
    return Observable(MatrixXcd::Identity(d, d));
  }

  // Pauli matrices, i in {0,1,2} -> sigma_x, sigma_y, sigma_z.
  static Observable pauli(int i) {
    MatrixXcd m(2, 2);
    switch (i) {
      case 0: m << 0, 1, 1, 0; break;
      case 1: m << 0, Complex(0, -1), Complex(0, 1), 0; break;
      case 2: m << 1, 0, 0, -1; break;
      default: throw std::invalid_argument("pauli index must be 0..2");
    }
    return Observable(m);
  }

  // Gell-Mann matrices, i in 1..8.
  static Observable gell_mann(int i) {
    MatrixXcd m = MatrixXcd::Zero(3, 3);
    const Complex I(0, 1);
    switch (i) {
      case 1: m(0, 1) = 1; m(1, 0) = 1; break;
      case 2: m(0, 1) = -I; m(1, 0) = I; break;
      case 3: m(0, 0) = 1; m(1, 1) = -1; break;
      case 4: m(0, 2) = 1; m(2, 0) = 1; break;
      case 5: m(0, 2) = -I; m(2, 0) = I; break;
      case 6: m(1, 2) = 1; m(2, 1) = 1; break;
      case 7: m(1, 2) = -I; m(2, 1) = I; break;
      case 8:
        m(0, 0) = 1; m(1, 1) = 1; m(2, 2) = -2;
        m /= std::sqrt(3.0);
        break;
      default: throw std::invalid_argument("gell-mann index must be 1..8");
    }
    return Observable(m);
  }

  double operator_norm() const {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(matrix,
                                                Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
};

struct DensityMatrix {
  MatrixXcd matrix;

  explicit DensityMatrix(MatrixXcd m) : matrix(std::move(m)) {
    if (matrix.rows() != matrix.cols())
      throw std::invalid_argument("density matrix must be square");
    const double scale = std::max(1.0, matrix.norm());
    if ((matrix - matrix.adjoint()).norm() > 1e-12 * scale)
      throw std::invalid_argument("density matrix is not Hermitian");
    if (std::abs(matrix.trace().real() - 1.0) > 1e-12 ||
        std::abs(matrix.trace().imag()) > 1e-12)
      throw std::invalid_argument("density matrix trace is not 1");
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(matrix,
                                                Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10)
      throw std::invalid_argument("density matrix is not PSD");
  }

  // Skips the O(d^3) PSD check; for sampler output that is PSD by
  // construction.
  struct unchecked_t {};
  DensityMatrix(MatrixXcd m, unchecked_t) : matrix(std::move(m)) {}

  int d() const { return static_cast<int>(matrix.rows()); }

  static DensityMatrix pure(const Eigen::VectorXcd& psi) {
    return DensityMatrix(psi * psi.adjoint(), unchecked_t{});
  }
  static DensityMatrix maximally_mixed(int d) {
    return DensityMatrix(MatrixXcd::Identity(d, d) / d, unchecked_t{});
  }
};

// ---------------------------------------------------------------------------
// Expectations, variances, uncertainty product, Robertson-Schrodinger bound.
//
// Convention note: this library uses the halved forms
//   {A,B} = (AB + BA)/2   and   [A,B] = (AB - BA)/(2i),
// under which the bound reads
//   (dA^2)(dB^2) >= (<{A,B}> - <A><B>)^2 + <[A,B]>^2.
// With the standard (unhalved) brackets each squared term picks up a
// factor 1/4.
// ---------------------------------------------------------------------------

inline double real_trace(const MatrixXcd& m, const char* what) {
  const Complex t = m.trace();
  if (std::abs(t.imag()) > 1e-10 * std::max(1.0, std::abs(t.real())))
    throw std::invalid_argument(std::string(what) +
                                ": trace has non-real residue");
  return t.real();
}

inline double expectation(const Observable& o, const DensityMatrix& rho) {
  if (o.d() != rho.d()) throw std::invalid_argument("dimension mismatch");
  return real_trace(o.matrix * rho.matrix, "expectation");
}

// Returns the squared uncertainty (Delta O)^2, clamped at 0.
inline double variance(const Observable& o, const DensityMatrix& rho) {
  const double m2 = expectation(Observable(o.matrix * o.matrix), rho);
  const double m1 = expectation(o, rho);
  double v = m2 - m1 * m1;
  if (v < 0.0 && v > -1e-10) v = 0.0;
  return v < 1e-12 ? std::max(v, 0.0) : v;
}

// Fast path used by the Monte-Carlo loops: squared uncertainty from
// precomputed O and O^2 without re-validating inputs.
inline double variance_fast(const MatrixXcd& o, const MatrixXcd& o2,
                            const MatrixXcd& rho) {
  const double m2 = (o2 * rho).trace().real();
  const double m1 = (o * rho).trace().real();
  const double v = m2 - m1 * m1;
  return v < 1e-12 ? std::max(v, 0.0) : v;
}

// (Delta A)^2 (Delta B)^2, computed directly and through the four-trace
// expansion reduced to d x d traces; the two must agree.
inline double product_functional(const Observable& a, const Observable& b,
                                 const DensityMatrix& rho) {
  const double direct = variance(a, rho) * variance(b, rho);
  const double ea2 = expectation(Observable(a.matrix * a.matrix), rho);
  const double eb2 = expectation(Observable(b.matrix * b.matrix), rho);
  const double ea = expectation(a, rho);
  const double eb = expectation(b, rho);
  const double expanded = ea2 * eb2 + ea * ea * eb * eb - ea2 * eb * eb -
                          eb2 * ea * ea;
  if (std::abs(direct - expanded) >
      1e-10 * std::max(1.0, std::abs(direct)))
    throw std::runtime_error("product functional route disagreement");
  return direct;
}

// L_0(A,B,rho) with the halved bracket conventions.
inline double lower_bound_L0(const Observable& a, const Observable& b,
                             const DensityMatrix& rho) {
  const MatrixXcd ab = a.matrix * b.matrix;
  const MatrixXcd ba = b.matrix * a.matrix;
  const double anti = 0.5 * ((ab + ba) * rho.matrix).trace().real();
  const Complex comm_tr = ((ab - ba) * rho.matrix).trace();
  const double comm = 0.5 * comm_tr.imag();  // <(AB-BA)/(2i)> is real
  const double ea = expectation(a, rho);
  const double eb = expectation(b, rho);
  const double covariance = anti - ea * eb;
  return covariance * covariance + comm * comm;
}

// ---------------------------------------------------------------------------
// The eight symmetric trace functionals Omega_1..Omega_8.
// ---------------------------------------------------------------------------

struct OmegaVector {
  std::array<double, 8> v;  // v[j-1] = Omega_j
  int d = 0;

  double operator[](int j) const { return v[j - 1]; }  // 1-based
};

inline OmegaVector omega_vector(const Observable& a, const Observable& b) {
  if (a.d() != b.d()) throw std::invalid_argument("dimension mismatch");
  const MatrixXcd& A = a.matrix;
  const MatrixXcd& B = b.matrix;
  const double trA = A.trace().real();
  const double trB = B.trace().real();
  const double trA2 = (A * A).trace().real();
  const double trB2 = (B * B).trace().real();
  const double trAB = (A * B).trace().real();
  const double trA2B = (A * A * B).trace().real();
  const double trAB2 = (A * B * B).trace().real();
  const double trA2B2 = (A * A * B * B).trace().real();
  const double trABAB = (A * B * A * B).trace().real();
  OmegaVector o;
  o.v = {trA * trA * trB * trB,
         trA2 * trB * trB + trA * trA * trB2,
         trAB * trA * trB,
         trA2 * trB2,
         trAB * trAB,
         trA2B * trB + trA * trAB2,
         trA2B2,
         trABAB};
  o.d = a.d();
  return o;
}

// 2*Omega_3 + d*Omega_4 + 4*Omega_8  >=  Omega_2 + d*Omega_5
// (difference of the pure-state averages of product and bound).
struct TraceInequalityResult {
  double lhs;
  double rhs;
  bool holds;
};

inline TraceInequalityResult trace_inequality_pure(const Observable& a,
                                                   const Observable& b) {
  const OmegaVector o = omega_vector(a, b);
  const double d = a.d();
  const double lhs = 2.0 * o[3] + d * o[4] + 4.0 * o[8];
  const double rhs = o[2] + d * o[5];
  return {lhs, rhs, lhs >= rhs - 1e-9};
}

// ---------------------------------------------------------------------------
// Asymptotic-freeness diagnostic for independent GUE observables.
//
// Checks the five large-d trace factorizations; with the GUE normalization
// (1/d)Tr[A^2] -> 1 the Omega_j scale like powers of d, and each deviation
// is reported as |lhs - rhs|/d so the five numbers shrink together as d
// grows. The normalization lives in sampling::gue.
// ---------------------------------------------------------------------------

struct FreenessReport {
  // Omega_8 vs d^-2 O2 - d^-3 O1; O3 vs d^-1 O1; O5 vs d^-2 O1;
  // O6 vs d^-1 O2; O7 vs d^-1 O4.
  std::array<double, 5> deviations;
};

inline FreenessReport freeness_diagnostic(const Observable& a,
                                          const Observable& b) {
  const OmegaVector o = omega_vector(a, b);
  const double d = a.d();
  FreenessReport r;
  r.deviations = {
      std::abs(o[8] - (o[2] / (d * d) - o[1] / (d * d * d))) / d,
      std::abs(o[3] - o[1] / d) / d,
      std::abs(o[5] - o[1] / (d * d)) / d,
      std::abs(o[6] - o[2] / d) / d,
      std::abs(o[7] - o[4] / d) / d,
  };
  return r;
}

}  // namespace haarmoment::functionals
