#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "haarmoment/symgroup.hpp"

namespace haarmoment::twirl {

using symgroup::Partition;
using symgroup::Permutation;

// ---------------------------------------------------------------------------
// Spectrum: d nonnegative eigenvalues summing to 1.
// ---------------------------------------------------------------------------

struct Spectrum {
  Eigen::VectorXd values;

  explicit Spectrum(Eigen::VectorXd v) : values(std::move(v)) {
    if (values.size() < 1) throw std::invalid_argument("empty spectrum");
    double sum = 0.0;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
      if (values[i] < -1e-12) throw std::invalid_argument("negative eigenvalue");
      sum += values[i];
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw std::invalid_argument("spectrum does not sum to 1");
  }

  int d() const { return static_cast<int>(values.size()); }

  static Spectrum uniform(int d) {
    return Spectrum(Eigen::VectorXd::Constant(d, 1.0 / d));
  }
  static Spectrum pure(int d) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
    v[0] = 1.0;
    return Spectrum(v);
  }
};

// t_k = Tr[Lambda^k]; returns [t_1..t_upto], t_1 = 1.
inline std::vector<double> power_sums(const Spectrum& lambda, int upto) {
  if (upto < 1 || upto > symgroup::kMaxOrder)
    throw std::invalid_argument("unsupported order");
  std::vector<double> t(upto);
  for (int k = 1; k <= upto; ++k) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < lambda.values.size(); ++i)
      s += std::pow(lambda.values[i], k);
    t[k - 1] = s;
  }
  return t;
}

// ---------------------------------------------------------------------------
// Delta coefficients of E_k(Lambda) = sum_lambda Delta_lambda C_lambda,
// generic over the scalar type so the same formulas run exactly over Q.
// Inputs are the power sums (t2, t3, t4); unused entries are ignored for
// small k. Partitions with rows > d are dropped (their C_lambda vanishes).
// ---------------------------------------------------------------------------

// Route (a): trace ratio Tr[Lambda^{ox k} C_lambda]/Tr[C_lambda] evaluated
// through the permutation expansion; Tr[Lambda^{ox k} P(pi)] is the product
// of power sums over the cycles of pi.
//
// The _moments variants take t_2^2 as an independent input so that ensemble
// expectations can be substituted directly: replacing (t_2, t_2^2, t_3, t_4)
// by their means is exact because every Delta is linear in these four
// quantities (t_2^2 only arises from the (2,2) cycle type at k = 4).
template <typename T>
T delta_trace_ratio_moments(const Partition& lambda, int d, const T& t2,
                            const T& t2_sq, const T& t3, const T& t4) {
  const int k = lambda.k();
  const auto dm = symgroup::dims(lambda, d);
  if (dm.dimQ == 0) return T(0);
  const std::array<T, 4> t{T(1), t2, t3, t4};
  T sum(0);
  for (const auto& pi : symgroup::enumerate_permutations(k)) {
    const auto cycles = pi.cycle_type();
    T prod(1);
    if (std::count(cycles.begin(), cycles.end(), 2) == 2) {
      prod = t2_sq;
    } else {
      for (int len : cycles) prod *= t[len - 1];
    }
    sum += T(symgroup::character(lambda, pi)) * prod;
  }
  return sum / (T(symgroup::factorial(k)) * T(dm.dimQ));
}

template <typename T>
T delta_trace_ratio(const Partition& lambda, int d, const T& t2, const T& t3,
                    const T& t4) {
  return delta_trace_ratio_moments(lambda, d, t2, t2 * t2, t3, t4);
}

// Route (b): the closed forms in t_2, t_2^2, t_3, t_4.
template <typename T>
T delta_closed_form_moments(const Partition& lambda, int d, const T& t2,
                            const T& t2sq, const T& t3, const T& t4) {
  const auto dm = symgroup::dims(lambda, d);
  if (dm.dimQ == 0) return T(0);
  const auto& p = lambda.parts;
  auto den = [&](std::initializer_list<int> offsets) {
    T r(1);
    for (int o : offsets) r *= T(d + o);
    return r;
  };
  if (p == std::vector<int>{1}) return T(1) / T(d);
  if (p == std::vector<int>{2}) return (T(1) + t2) / den({0, 1});
  if (p == std::vector<int>{1, 1}) return (T(1) - t2) / den({-1, 0});
  if (p == std::vector<int>{3})
    return (T(1) + T(3) * t2 + T(2) * t3) / den({0, 1, 2});
  if (p == std::vector<int>{2, 1}) return (T(1) - t3) / den({-1, 0, 1});
  if (p == std::vector<int>{1, 1, 1})
    return (T(1) - T(3) * t2 + T(2) * t3) / den({-2, -1, 0});
  if (p == std::vector<int>{4})
    return (T(1) + T(6) * t2 + T(3) * t2sq + T(8) * t3 + T(6) * t4) /
           den({0, 1, 2, 3});
  if (p == std::vector<int>{3, 1})
    return (T(1) + T(2) * t2 - t2sq - T(2) * t4) / den({-1, 0, 1, 2});
  if (p == std::vector<int>{2, 2})
    return (T(1) + T(3) * t2sq - T(4) * t3) / den({-1, 0, 0, 1});
  if (p == std::vector<int>{2, 1, 1})
    return (T(1) - T(2) * t2 - t2sq + T(2) * t4) / den({-2, -1, 0, 1});
  if (p == std::vector<int>{1, 1, 1, 1})
    return (T(1) - T(6) * t2 + T(3) * t2sq + T(8) * t3 - T(6) * t4) /
           den({-3, -2, -1, 0});
  throw std::invalid_argument("unsupported partition");
}

template <typename T>
T delta_closed_form(const Partition& lambda, int d, const T& t2, const T& t3,
                    const T& t4) {
  return delta_closed_form_moments(lambda, d, t2, t2 * t2, t3, t4);
}

struct DeltaCoefficients {
  int k;
  int d;
  std::map<Partition, double> value;  // partitions with rows <= d only
};

// Computes every Delta two ways and rejects disagreement beyond 1e-10.
inline DeltaCoefficients delta_coefficients(const Spectrum& lambda, int k) {
  if (k < 1 || k > symgroup::kMaxOrder)
    throw std::invalid_argument("unsupported order");
  const int d = lambda.d();
  const auto t = power_sums(lambda, symgroup::kMaxOrder <= k ? k : k);
  const double t2 = k >= 2 ? t[1] : 0.0;
  const double t3 = k >= 3 ? t[2] : 0.0;
  const double t4 = k >= 4 ? t[3] : 0.0;
  DeltaCoefficients out{k, d, {}};
  for (const auto& part : symgroup::partitions_of(k)) {
    if (part.rows() > d) continue;
    const double a = delta_trace_ratio<double>(part, d, t2, t3, t4);
    const double b = delta_closed_form<double>(part, d, t2, t3, t4);
    if (std::abs(a - b) > 1e-10)
      throw std::runtime_error("delta coefficient route disagreement");
    out.value.emplace(part, b);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Dense twirl matrices (test/diagnostic path; production averages work from
// the Delta coefficients directly and never materialize d^k matrices).
// ---------------------------------------------------------------------------

// E_k(Lambda) = sum_lambda Delta_lambda C_lambda, real symmetric.
inline Eigen::MatrixXd twirl_projector(const Spectrum& lambda, int k) {
  const auto deltas = delta_coefficients(lambda, k);
  const auto proj = symgroup::central_projectors(k, lambda.d());
  const long side = symgroup::tensor_side(lambda.d(), k);
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(side, side);
  for (const auto& [part, C] : proj.projectors) E += deltas.value.at(part) * C;
  return E;
}

// General Haar twirl of M on (C^d)^{ox k} via the Weingarten expansion:
// (sum_pi Tr[M P(pi)] P(pi^{-1})) (sum_pi Wg(pi) P(pi^{-1})).
inline Eigen::MatrixXcd twirl_weingarten(const Eigen::MatrixXcd& M, int k,
                                         int d) {
  const long side = symgroup::tensor_side(d, k);
  if (M.rows() != side || M.cols() != side)
    throw std::invalid_argument("matrix side does not match d^k");
  Eigen::MatrixXcd s1 = Eigen::MatrixXcd::Zero(side, side);
  Eigen::MatrixXcd s2 = Eigen::MatrixXcd::Zero(side, side);
  for (const auto& pi : symgroup::enumerate_permutations(k)) {
    const Eigen::MatrixXd Pinv =
        symgroup::permutation_operator(pi.inverse(), d);
    const Eigen::MatrixXd P = symgroup::permutation_operator(pi, d);
    // Tr[M P] without forming the product.
    const std::complex<double> tr =
        M.cwiseProduct(P.transpose().cast<std::complex<double>>()).sum();
    s1 += tr * Pinv.cast<std::complex<double>>();
    s2 += to_double(symgroup::weingarten(pi, d)) *
          Pinv.cast<std::complex<double>>();
  }
  return s1 * s2;
}

// Integral of |psi><psi|^{ox k}: the normalized symmetric-subspace projector
// C_(k) * k!(d-1)!/(d+k-1)! = C_(k)/dimQ((k),d).
inline Eigen::MatrixXd pure_moment(int k, int d) {
  const Partition sym{std::vector<int>(1, k)};
  const auto proj = symgroup::central_projectors(k, d);
  return proj.projectors.at(sym) /
         static_cast<double>(symgroup::dims(sym, d).dimQ);
}

}  // namespace haarmoment::twirl
