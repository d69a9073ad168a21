#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "haarmoment/functionals.hpp"
#include "haarmoment/rational.hpp"
#include "haarmoment/twirl.hpp"

// Closed-form coefficient families for the ensemble-averaged uncertainty
// product and its Robertson-Schrodinger lower bound, expressed in the
// Omega_1..Omega_8 basis:
//
//   E[ (dA)^2 (dB)^2 ]  =  sum_j c_j Omega_j(A, B)
//
// over the isospectral orbit of a spectrum Lambda (omega_iso), Haar pure
// states (u/l), and the Hilbert-Schmidt ensemble (omega_bar, beta,
// beta_prime, and the dedicated d=2/d=3 vectors where the generic N_d
// expressions are singular).
//
// Everything is assembled mechanically from the Delta coefficients of the
// twirl E_k(Lambda) = sum Delta_lambda C_lambda in exact rational
// arithmetic, and converted to float only at the API boundary: the N_d
// denominators d^2(d^2-1)(d^2-4)(d^2-9) cancel catastrophically in float.
// Where an independent closed form exists (the N_d polynomials, the K_d
// pure-state lists) both routes are computed and must agree.
namespace haarmoment::closedforms {

using functionals::Observable;
using functionals::OmegaVector;
using symgroup::Partition;
using twirl::Spectrum;

enum class Family {
  omega_iso,
  u,
  l,
  omega_bar,
  beta,
  beta_prime,
  dim2_product,
  dim2_bound,
  dim3_product,
  dim3_bound,
};

inline const char* family_name(Family f) {
  switch (f) {
    case Family::omega_iso: return "omega_iso";
    case Family::u: return "u";
    case Family::l: return "l";
    case Family::omega_bar: return "omega_bar";
    case Family::beta: return "beta";
    case Family::beta_prime: return "beta_prime";
    case Family::dim2_product: return "dim2_product";
    case Family::dim2_bound: return "dim2_bound";
    case Family::dim3_product: return "dim3_product";
    case Family::dim3_bound: return "dim3_bound";
  }
  return "?";
}

struct CoefficientVector {
  Family family;
  int d;
  std::array<double, 8> c;  // c[j-1] is the coefficient of Omega_j

  double operator[](int j) const { return c[j - 1]; }  // 1-based
};

// Ensemble moments of t_k = Tr[rho^k] over the Hilbert-Schmidt measure.
// <t_2^2> is carried separately from <t_2>^2: the fourth-order twirl is
// linear in (t_2, t_2^2, t_3, t_4) jointly, so averaging a coefficient
// formula means substituting all four means.
struct MomentTable {
  double t2;
  double t3;
  double t4;
  double t2_sq;
  int d;
};

// ---------------------------------------------------------------------------
// Mechanical assembly from Delta coefficients.
// ---------------------------------------------------------------------------

// The ten Delta coefficients of E_2, E_3, E_4 for one spectrum (or one set
// of substituted moments). Entries for partitions with more rows than d are
// zero, matching the vanishing of their projectors.
template <typename T>
struct DeltaSet {
  T d2_2{}, d2_11{};
  T d3_3{}, d3_21{}, d3_111{};
  T d4_4{}, d4_31{}, d4_22{}, d4_211{}, d4_1111{};
};

template <typename T>
DeltaSet<T> delta_set(int d, const T& t2, const T& t2_sq, const T& t3,
                      const T& t4) {
  auto delta = [&](std::initializer_list<int> parts) {
    const Partition p{std::vector<int>(parts)};
    return twirl::delta_closed_form_moments<T>(p, d, t2, t2_sq, t3, t4);
  };
  DeltaSet<T> D;
  D.d2_2 = delta({2});
  D.d2_11 = delta({1, 1});
  D.d3_3 = delta({3});
  D.d3_21 = delta({2, 1});
  D.d3_111 = delta({1, 1, 1});
  D.d4_4 = delta({4});
  D.d4_31 = delta({3, 1});
  D.d4_22 = delta({2, 2});
  D.d4_211 = delta({2, 1, 1});
  D.d4_1111 = delta({1, 1, 1, 1});
  return D;
}

// Coefficients of E[<A^2><B^2> - <A^2><B>^2 - <A>^2<B^2> + <A>^2<B>^2]:
// the <A^2><B^2> term contracts A^2 x B^2 against E_2, the cross terms
// contract A^2 x B x B (and its mirror) against E_3, and <A>^2<B>^2
// contracts A x A x B x B against E_4. Each contraction reduces, through
// the character expansion of C_lambda, to a fixed integer pattern over the
// Omega basis.
template <typename T>
std::array<T, 8> product_assembly(const DeltaSet<T>& D) {
  std::array<T, 8> c{};
  const T half = T(1) / T(2);
  // E_2 term.
  c[3] += (D.d2_2 + D.d2_11) * half;
  c[6] += (D.d2_2 - D.d2_11) * half;
  // E_4 term.
  struct Row {
    T delta;
    T weight;
    std::array<int, 8> v;
  };
  const std::array<Row, 5> e4{{
      {D.d4_4, T(1) / T(24), {1, 1, 4, 1, 2, 4, 4, 2}},
      {D.d4_31, T(1) / T(8), {3, 1, 4, -1, -2, 0, -4, -2}},
      {D.d4_22, T(1) / T(12), {2, 0, 0, 2, 4, -4, 0, 0}},
      {D.d4_211, T(1) / T(8), {3, -1, -4, -1, -2, 0, 4, 2}},
      {D.d4_1111, T(1) / T(24), {1, -1, -4, 1, 2, 4, -4, -2}},
  }};
  for (const auto& row : e4)
    for (int j = 0; j < 8; ++j) c[j] += row.delta * row.weight * T(row.v[j]);
  // E_3 cross terms (subtracted).
  const std::array<Row, 3> e3{{
      {D.d3_3, T(1) / T(6), {0, 1, 0, 2, 0, 2, 4, 0}},
      {D.d3_21, T(2) / T(3), {0, 1, 0, 0, 0, 0, -2, 0}},
      {D.d3_111, T(1) / T(6), {0, 1, 0, -2, 0, -2, 4, 0}},
  }};
  for (const auto& row : e3)
    for (int j = 0; j < 8; ++j) c[j] -= row.delta * row.weight * T(row.v[j]);
  return c;
}

// Coefficients of E[(<{A,B}> - <A><B>)^2] and, with the commutator term,
// E[(<{A,B}> - <A><B>)^2 + <[A,B]>^2] under the halved bracket
// conventions (see functionals.hpp). The squared anticommutator mean
// contracts against E_2, the mixed term against E_3, and <A>^2<B>^2 reuses
// the E_4 pattern of the product.
template <typename T>
std::array<T, 8> bound_assembly(const DeltaSet<T>& D, bool with_commutator) {
  std::array<T, 8> c{};
  const T half = T(1) / T(2);
  const T quarter = T(1) / T(4);
  // E[<{A,B}>^2].
  c[4] += (D.d2_2 + D.d2_11) * half;
  c[6] += (D.d2_2 - D.d2_11) * quarter;
  c[7] += (D.d2_2 - D.d2_11) * quarter;
  // E[<A>^2<B>^2]: same E_4 pattern as the product; feeding only the k=4
  // entries through product_assembly isolates exactly that pattern.
  DeltaSet<T> quartic;
  quartic.d4_4 = D.d4_4;
  quartic.d4_31 = D.d4_31;
  quartic.d4_22 = D.d4_22;
  quartic.d4_211 = D.d4_211;
  quartic.d4_1111 = D.d4_1111;
  const auto e4 = product_assembly(quartic);
  for (int j = 0; j < 8; ++j) c[j] += e4[j];
  // -2 E[<{A,B}><A><B>].
  const T sixth = T(1) / T(6);
  const T f1 = (D.d3_3 + T(4) * D.d3_21 + D.d3_111) * sixth;
  const T f2 = (D.d3_3 - D.d3_111) * sixth;
  const T f3 = (D.d3_3 - T(2) * D.d3_21 + D.d3_111) * sixth;
  c[2] -= T(2) * f1;
  c[4] -= T(2) * f2;
  c[5] -= T(2) * f2;
  c[6] -= T(2) * f3;
  c[7] -= T(2) * f3;
  if (with_commutator) {
    // E[<[A,B]>^2] contributes (Delta_2 - Delta_11)/4 (Omega_7 - Omega_8).
    c[6] += (D.d2_2 - D.d2_11) * quarter;
    c[7] -= (D.d2_2 - D.d2_11) * quarter;
  }
  return c;
}

// ---------------------------------------------------------------------------
// The N_d polynomial form of omega_j(Lambda), d >= 4.
//
// N_d^{-1} = d^2(d^2-1)(d^2-4)(d^2-9). The commonly quoted form of the
// omega_7 constant term, -d(d^3+4d^2-9d-16), disagrees with the mechanical
// assembly; exact rational cross-checking fixes it to -d(d^4-5d^2-16)
// (equivalently, a correction of -d^2(d-1)(d^2-9)N_d). All other entries
// match the assembly identically.
// ---------------------------------------------------------------------------

template <typename T>
std::array<T, 8> omega_polynomial(int d, const T& t2, const T& t2_sq,
                                  const T& t3, const T& t4) {
  if (d < 4)
    throw std::domain_error("N_d polynomial form requires d >= 4");
  const T D(d);
  const T d2 = D * D, d3 = d2 * D, d4 = d3 * D, d5 = d4 * D, d6 = d5 * D;
  const T Nd = T(1) / (d2 * (d2 - T(1)) * (d2 - T(4)) * (d2 - T(9)));
  std::array<T, 8> w;
  w[0] = (d4 - T(8) * d2 + T(6)) - T(6) * D * (d2 - T(4)) * t2 +
         T(3) * (d2 + T(6)) * t2_sq + T(8) * (T(2) * d2 - T(3)) * t3 -
         T(30) * D * t4;
  w[1] = -D * (d4 - T(10) * d2 + T(14)) +
         T(2) * d2 * (T(2) * d2 - T(13)) * t2 - D * (d2 + T(6)) * t2_sq -
         T(8) * D * (d2 - T(4)) * t3 + T(10) * d2 * t4;
  w[2] = -T(4) * D * (d2 - T(4)) + T(4) * d2 * (d2 + T(1)) * t2 -
         T(4) * D * (d2 + T(6)) * t2_sq - T(16) * D * (d2 + T(1)) * t3 +
         T(40) * d2 * t4;
  w[3] = (d6 - T(11) * d4 + T(19) * d2 + T(6)) -
         D * (T(3) * d4 - T(25) * d2 + T(12)) * t2 +
         (d4 - T(6) * d2 + T(18)) * t2_sq +
         T(4) * (d4 - T(5) * d2 - T(6)) * t3 -
         T(2) * D * (T(2) * d2 - T(3)) * t4;
  w[4] = T(2) * (d2 + T(6)) - T(4) * D * (d2 + T(6)) * t2 +
         T(2) * (d4 - T(6) * d2 + T(18)) * t2_sq +
         T(16) * (T(2) * d2 - T(3)) * t3 - T(4) * D * (T(2) * d2 - T(3)) * t4;
  w[5] = T(2) * (d4 - T(5) * d2 - T(6)) -
         T(2) * D * (d4 - d2 - T(12)) * t2 +
         T(12) * (T(2) * d2 - T(3)) * t2_sq +
         T(8) * (d4 - T(3) * d2 + T(6)) * t3 -
         T(12) * D * (d2 + T(1)) * t4;
  w[6] = -D * (d4 - T(5) * d2 - T(16)) + d2 * (d4 - d2 - T(32)) * t2 -
         T(4) * D * (T(2) * d2 - T(3)) * t2_sq -
         T(4) * D * (d4 - T(5) * d2 + T(4)) * t3 +
         T(4) * d2 * (d2 + T(1)) * t4;
  w[7] = -T(10) * D + T(20) * d2 * t2 -
         T(2) * D * (T(2) * d2 - T(3)) * t2_sq -
         T(8) * D * (d2 + T(1)) * t3 + T(2) * d2 * (d2 + T(1)) * t4;
  for (auto& x : w) x *= Nd;
  return w;
}

// ---------------------------------------------------------------------------
// Coefficient families.
// ---------------------------------------------------------------------------

inline CoefficientVector make_vector(Family f, int d,
                                     const std::array<Rational, 8>& c) {
  CoefficientVector out{f, d, {}};
  for (int j = 0; j < 8; ++j) out.c[j] = to_double(c[j]);
  return out;
}

// Average uncertainty product over the isospectral orbit of Lambda. The
// Delta-form assembly is the ground truth for every d >= 2; for d >= 4 the
// N_d polynomial form is computed as well and must agree to 1e-10.
inline CoefficientVector omega_iso(const Spectrum& lambda) {
  const int d = lambda.d();
  const auto t = twirl::power_sums(lambda, 4);
  const double t2 = t[1], t3 = t[2], t4 = t[3];
  const auto D = delta_set<double>(d, t2, t2 * t2, t3, t4);
  const auto c = product_assembly(D);
  CoefficientVector out{Family::omega_iso, d, {}};
  for (int j = 0; j < 8; ++j) out.c[j] = c[j];
  if (d >= 4) {
    const auto w = omega_polynomial<double>(d, t2, t2 * t2, t3, t4);
    for (int j = 0; j < 8; ++j) {
      if (std::abs(w[j] - c[j]) > 1e-10)
        throw std::runtime_error("omega_iso route disagreement at j=" +
                                 std::to_string(j + 1));
    }
  }
  return out;
}

// Pure-state averages: u (product) and l (lower bound), both K_d-rational
// with K_d = 1/(d(d+1)(d+2)(d+3)). The explicit lists double as a
// transcription check against the assembly at t_k = 1; the commonly quoted
// l_7 = (d^2+d-2)K_d and l_8 = -2(2d+5)K_d fail that check (and the A = B
// consistency l(A,A).Omega = u(A,A).Omega), so the assembly values
// l_7 = (d^2+3d+4)K_d and l_8 = -2(d+2)K_d are used.
struct PureCoefficients {
  CoefficientVector u;
  CoefficientVector l;
};

inline PureCoefficients pure_coefficients(int d) {
  if (d < 2) throw std::domain_error("pure_coefficients requires d >= 2");
  const Rational one(1);
  const auto D = delta_set<Rational>(d, one, one, one, one);
  const auto u = product_assembly(D);
  const auto l = bound_assembly(D, true);
  const Rational K = Rational(1) / (Rational(d) * (d + 1) * (d + 2) * (d + 3));
  const std::array<Rational, 8> u_listed{
      K,           -(d + 2) * K,        Rational(4) * K, (d * d + 3 * d + 1) * K,
      2 * K,       -2 * (d + 1) * K,    (d * d + d - 2) * K, 2 * K};
  const std::array<Rational, 8> l_listed{
      K,           K,                   -2 * (d + 1) * K, K,
      (d + 1) * (d + 2) * K, -2 * (d + 1) * K, (d * d + 3 * d + 4) * K,
      -2 * (d + 2) * K};
  for (int j = 0; j < 8; ++j) {
    if (u[j] != u_listed[j] || l[j] != l_listed[j])
      throw std::runtime_error("pure coefficient route disagreement at j=" +
                               std::to_string(j + 1));
  }
  return {make_vector(Family::u, d, u), make_vector(Family::l, d, l)};
}

inline std::array<Rational, 4> hs_moments_exact(int d) {
  const Rational D(d);
  const Rational q1 = D * D + 1, q2 = D * D + 2, q3 = D * D + 3;
  return {
      2 * D / q1,
      (5 * D * D + 1) / (q1 * q2),
      (14 * D * D * D + 10 * D) / (q1 * q2 * q3),
      (4 * D * D * D * D + 18 * D * D + 2) / (q1 * q2 * q3),
  };
}

// <t_2>, <t_3>, <t_4>, <t_2^2> over the Hilbert-Schmidt measure.
inline MomentTable hs_moments(int d) {
  if (d < 2) throw std::domain_error("hs_moments requires d >= 2");
  const auto m = hs_moments_exact(d);
  return {to_double(m[0]), to_double(m[1]), to_double(m[2]), to_double(m[3]),
          d};
}

namespace detail {

template <typename T>
DeltaSet<T> hs_delta_set(int d) {
  const auto m = hs_moments_exact(d);
  return delta_set<T>(d, T(m[0]), T(m[3]), T(m[1]), T(m[2]));
}

}  // namespace detail

// Average uncertainty product over the Hilbert-Schmidt ensemble, d >= 4.
// Dual route: moment substitution into the Delta assembly, and into the
// N_d polynomial form; exact agreement is required.
inline CoefficientVector omega_bar(int d) {
  if (d < 4)
    throw std::domain_error(
        "omega_bar requires d >= 4; use lowdim_coefficients for d = 2, 3");
  const auto D = detail::hs_delta_set<Rational>(d);
  const auto c = product_assembly(D);
  const auto m = hs_moments_exact(d);
  const auto w = omega_polynomial<Rational>(d, m[0], m[3], m[1], m[2]);
  for (int j = 0; j < 8; ++j) {
    if (c[j] != w[j])
      throw std::runtime_error("omega_bar route disagreement at j=" +
                               std::to_string(j + 1));
  }
  return make_vector(Family::omega_bar, d, c);
}

// Average of the lower bound over the Hilbert-Schmidt ensemble, d >= 4:
// beta without the commutator term, beta_prime with it. They differ only
// in j = 7, 8 by (1/(2d(d^2+1)))(Omega_7 - Omega_8), which is asserted.
struct LowerBoundCoefficients {
  CoefficientVector beta;
  CoefficientVector beta_prime;
};

inline LowerBoundCoefficients lower_bound_coefficients(int d) {
  if (d < 4)
    throw std::domain_error(
        "lower_bound_coefficients requires d >= 4; use lowdim_coefficients "
        "for d = 2, 3");
  const auto D = detail::hs_delta_set<Rational>(d);
  const auto beta = bound_assembly(D, false);
  const auto beta_prime = bound_assembly(D, true);
  for (int j = 0; j < 6; ++j) {
    if (beta[j] != beta_prime[j])
      throw std::runtime_error("beta/beta' disagree below j=7");
  }
  const Rational split =
      Rational(1) / (2 * Rational(d) * (Rational(d) * d + 1));
  if (beta_prime[6] - beta[6] != split || beta[7] - beta_prime[7] != split)
    throw std::runtime_error("commutator split identity failed");
  return {make_vector(Family::beta, d, beta),
          make_vector(Family::beta_prime, d, beta_prime)};
}

// Hilbert-Schmidt product/bound coefficients for d = 2 and d = 3, where
// the N_d families are singular. Assembled from the Delta averages with
// the row-limited partition set; the commonly quoted d=3 product entry
// 109/1032 for Omega_4 fails the assembly (and Monte-Carlo), the correct
// value is 109/1320.
struct LowdimCoefficients {
  CoefficientVector product;
  CoefficientVector bound;
};

inline LowdimCoefficients lowdim_coefficients(int d) {
  if (d != 2 && d != 3)
    throw std::domain_error(
        "lowdim_coefficients is defined for d = 2, 3; use omega_bar / "
        "lower_bound_coefficients otherwise");
  const auto D = detail::hs_delta_set<Rational>(d);
  const auto product = product_assembly(D);
  const auto bound = bound_assembly(D, true);
  const Family fp = d == 2 ? Family::dim2_product : Family::dim3_product;
  const Family fb = d == 2 ? Family::dim2_bound : Family::dim3_bound;
  return {make_vector(fp, d, product), make_vector(fb, d, bound)};
}

// Average squared uncertainty of a single observable:
// ((d - t_2)/(d^2 - 1)) (Tr A^2 - (Tr A)^2/d) over the isospectral orbit.
inline double average_iso_variance(const Spectrum& lambda,
                                   const Observable& a) {
  const int d = lambda.d();
  if (a.d() != d) throw std::invalid_argument("dimension mismatch");
  const double t2 = twirl::power_sums(lambda, 2)[1];
  const double trA = a.matrix.trace().real();
  const double trA2 = (a.matrix * a.matrix).trace().real();
  return (d - t2) / (static_cast<double>(d) * d - 1.0) *
         (trA2 - trA * trA / d);
}

// Hilbert-Schmidt version: (d/(d^2+1)) (Tr A^2 - (Tr A)^2/d).
inline double average_hs_variance(const Observable& a) {
  const int d = a.d();
  const double trA = a.matrix.trace().real();
  const double trA2 = (a.matrix * a.matrix).trace().real();
  return d / (static_cast<double>(d) * d + 1.0) * (trA2 - trA * trA / d);
}

// sum_j c_j Omega_j.
inline double assemble_average(const CoefficientVector& coeffs,
                               const OmegaVector& omega) {
  if (omega.d != 0 && omega.d != coeffs.d)
    throw std::domain_error("coefficient/observable dimension mismatch");
  double s = 0.0;
  for (int j = 1; j <= 8; ++j) s += coeffs[j] * omega[j];
  return s;
}

}  // namespace haarmoment::closedforms

namespace haarmoment::functionals {

// sum_j (omega_bar_j - beta'_j) Omega_j(A, B): the gap between the
// HS-averaged product and the HS-averaged lower bound; nonnegative since
// it is the ensemble average of a nonnegative function. Defined here (it
// needs the coefficient families) and surfaced in this namespace beside
// the other Omega-basis functionals.
inline double mixed_difference(const Observable& a, const Observable& b,
                               int d) {
  if (a.d() != d || b.d() != d)
    throw std::invalid_argument("dimension mismatch");
  const auto omega = omega_vector(a, b);
  if (d == 2 || d == 3) {
    const auto low = closedforms::lowdim_coefficients(d);
    return closedforms::assemble_average(low.product, omega) -
           closedforms::assemble_average(low.bound, omega);
  }
  const auto wb = closedforms::omega_bar(d);
  const auto lb = closedforms::lower_bound_coefficients(d);
  return closedforms::assemble_average(wb, omega) -
         closedforms::assemble_average(lb.beta_prime, omega);
}

}  // namespace haarmoment::functionals
