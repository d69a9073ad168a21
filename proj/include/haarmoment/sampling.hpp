#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>

#include "haarmoment/functionals.hpp"
#include "haarmoment/twirl.hpp"

namespace haarmoment::sampling {

using functionals::DensityMatrix;
using functionals::Observable;
using twirl::Spectrum;

// ---------------------------------------------------------------------------
// Counter-based seeded stream.
//
// Output i of stream (seed, stream_id) is mix64(base + i * gamma) with a
// per-stream odd gamma (the SplittableRandom construction), so streams are
// value-semantic, advance locally, and can be handed to workers by id
// without any sequence splitting. Identical (seed, stream_id) reproduce the
// sequence bit-exactly.
// ---------------------------------------------------------------------------

struct SeededStream {
  std::uint64_t seed;
  std::uint64_t stream_id;

  SeededStream(std::uint64_t seed_, std::uint64_t stream_id_)
      : seed(seed_), stream_id(stream_id_) {
    base_ = mix64(seed_ ^ 0x6a09e667f3bcc909ULL);
    gamma_ = mix64(stream_id_ + 0x9e3779b97f4a7c15ULL) | 1ULL;
  }

  std::uint64_t next_u64() { return mix64(base_ + (++counter_) * gamma_); }

  // Uniform on (0, 1]; never zero, so it is safe under log().
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; the paired value is cached.
  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double theta = 2.0 * std::numbers::pi * uniform();
    cached_ = r * std::sin(theta);
    has_cached_ = true;
    return r * std::cos(theta);
  }

 private:
  static std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t base_;
  std::uint64_t gamma_;
  std::uint64_t counter_ = 0;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

// ---------------------------------------------------------------------------
// Generators.
// ---------------------------------------------------------------------------

// d x d matrix of i.i.d. standard complex Gaussians (real and imaginary
// parts each of variance 1/2, so E|G_ij|^2 = 1).
inline Eigen::MatrixXcd ginibre(int d, SeededStream& s) {
  if (d < 1) throw std::invalid_argument("dimension must be positive");
  Eigen::MatrixXcd g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      g(i, j) = std::complex<double>(s.normal(), s.normal()) / std::sqrt(2.0);
  return g;
}

// Haar-distributed unitary: QR of a Ginibre matrix with the diagonal of R
// rotated to positive reals. The phase fix is not optional — raw
// HouseholderQR output is not Haar-distributed and biases every downstream
// average.
inline Eigen::MatrixXcd haar_unitary(int d, SeededStream& s) {
  const Eigen::MatrixXcd g = ginibre(d, s);
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j) {
    const std::complex<double> rjj = r(j, j);
    q.col(j) *= rjj / std::abs(rjj);
  }
  return q;
}

// Uniform pure state: normalized complex Gaussian vector.
inline Eigen::VectorXcd haar_pure_state(int d, SeededStream& s) {
  if (d < 1) throw std::invalid_argument("dimension must be positive");
  Eigen::VectorXcd psi(d);
  for (int i = 0; i < d; ++i)
    psi(i) = std::complex<double>(s.normal(), s.normal());
  psi /= psi.norm();
  return psi;
}

// Hilbert-Schmidt random density matrix: GG^dag / Tr(GG^dag), equivalently
// the partial trace of a Haar pure state on C^d (x) C^d.
inline DensityMatrix hs_density(int d, SeededStream& s) {
  const Eigen::MatrixXcd g = ginibre(d, s);
  Eigen::MatrixXcd w = g * g.adjoint();
  w /= w.trace().real();
  return DensityMatrix(std::move(w), DensityMatrix::unchecked_t{});
}

// Uniform point on the isospectral orbit {U diag(Lambda) U^dag}.
inline DensityMatrix isospectral(const Spectrum& lambda, SeededStream& s) {
  const int d = lambda.d();
  const Eigen::MatrixXcd u = haar_unitary(d, s);
  const Eigen::MatrixXcd rho =
      u * lambda.values.cast<std::complex<double>>().asDiagonal() *
      u.adjoint();
  return DensityMatrix(rho, DensityMatrix::unchecked_t{});
}

// GUE observable, normalized as A = (G + G^dag)/sqrt(2d) so that entries
// have variance 1/d and (1/d) Tr A^2 -> 1 as d grows (semicircle second
// moment). This is the one place the GUE scale is fixed; the freeness
// diagnostic depends on it.
inline Observable gue(int d, SeededStream& s) {
  const Eigen::MatrixXcd g = ginibre(d, s);
  return Observable((g + g.adjoint()) / std::sqrt(2.0 * d));
}

// Seeded Hermitian observable with O(1) entries; handy as a generic random
// test matrix where no particular ensemble is required.
inline Observable random_hermitian(int d, SeededStream& s) {
  Eigen::MatrixXcd m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      m(i, j) = std::complex<double>(s.normal(), s.normal());
  return Observable((m + m.adjoint()) / 2.0);
}

// Seeded point on the probability simplex (flat Dirichlet), for spectrum
// fixtures.
inline Spectrum random_spectrum(int d, SeededStream& s) {
  Eigen::VectorXd v(d);
  for (int i = 0; i < d; ++i) v(i) = -std::log(s.uniform());
  v /= v.sum();
  return Spectrum(v);
}

}  // namespace haarmoment::sampling
