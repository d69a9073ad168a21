#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "haarmoment/rational.hpp"
#include "haarmoment/twirl.hpp"

using namespace haarmoment;
using symgroup::Partition;
using twirl::Spectrum;

namespace {

Spectrum fixture_spectrum(int d, int variant) {
  Eigen::VectorXd v(d);
  for (int i = 0; i < d; ++i) v(i) = 1.0 + ((i * 7 + variant * 3) % 5);
  v /= v.sum();
  return Spectrum(v);
}

}  // namespace

TEST_CASE("spectrum validation") {
  CHECK_THROWS(Spectrum(Eigen::Vector2d(0.6, 0.6)));
  CHECK_THROWS(Spectrum(Eigen::Vector2d(1.2, -0.2)));
  CHECK(Spectrum::uniform(3).values.isApproxToConstant(1.0 / 3));
  CHECK(Spectrum::pure(4).values(0) == 1.0);
}

TEST_CASE("power sums") {
  const auto t = twirl::power_sums(Spectrum::uniform(4), 4);
  CHECK(t[0] == doctest::Approx(1.0));
  CHECK(t[1] == doctest::Approx(0.25));
  CHECK(t[2] == doctest::Approx(0.0625));
  const auto tp = twirl::power_sums(Spectrum::pure(5), 4);
  for (double x : tp) CHECK(x == doctest::Approx(1.0));
}

TEST_CASE("delta routes agree on random spectra") {
  for (int d = 2; d <= 6; ++d) {
    for (int variant = 0; variant < 5; ++variant) {
      const auto lam = fixture_spectrum(d, variant);
      for (int k = 2; k <= 4; ++k)
        CHECK_NOTHROW((void)twirl::delta_coefficients(lam, k));
    }
  }
}

TEST_CASE("delta coefficients are the projector expansion of the twirl") {
  // Tr[E_k(Lambda) C_lambda] = Delta_lambda Tr[C_lambda], with E_k built
  // from the independent Weingarten route.
  for (int d = 2; d <= 3; ++d) {
    const auto lam = fixture_spectrum(d, 1);
    for (int k = 2; k <= 3; ++k) {
      Eigen::MatrixXcd tk =
          Eigen::VectorXcd::Ones(1).asDiagonal();  // placeholder
      // Lambda^{(x) k} as a diagonal matrix.
      const long side = symgroup::tensor_side(d, k);
      Eigen::VectorXd diag(side);
      for (long idx = 0; idx < side; ++idx) {
        long c = idx;
        double p = 1.0;
        for (int leg = 0; leg < k; ++leg) {
          p *= lam.values(c % d);
          c /= d;
        }
        diag(idx) = p;
      }
      const Eigen::MatrixXcd M =
          diag.cast<std::complex<double>>().asDiagonal();
      const Eigen::MatrixXcd E = twirl::twirl_weingarten(M, k, d);
      const auto deltas = twirl::delta_coefficients(lam, k);
      const auto proj = symgroup::central_projectors(k, d);
      for (const auto& [la, C] : proj.projectors) {
        const double lhs = (E * C.cast<std::complex<double>>()).trace().real();
        const double rhs = deltas.value.at(la) * C.trace();
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
      }
      (void)tk;
    }
  }
}

TEST_CASE("twirl projector equals weingarten twirl of the tensor power") {
  for (int d = 2; d <= 4; ++d) {
    const auto lam = fixture_spectrum(d, 2);
    for (int k = 2; k <= 3; ++k) {
      const long side = symgroup::tensor_side(d, k);
      Eigen::VectorXd diag(side);
      for (long idx = 0; idx < side; ++idx) {
        long c = idx;
        double p = 1.0;
        for (int leg = 0; leg < k; ++leg) {
          p *= lam.values(c % d);
          c /= d;
        }
        diag(idx) = p;
      }
      const Eigen::MatrixXcd M =
          diag.cast<std::complex<double>>().asDiagonal();
      const Eigen::MatrixXcd viaWg = twirl::twirl_weingarten(M, k, d);
      const Eigen::MatrixXd viaProj = twirl::twirl_projector(lam, k);
      CHECK((viaWg - viaProj.cast<std::complex<double>>()).norm() < 1e-10);
    }
  }
}

TEST_CASE("twirl output commutes with tensor-power unitaries") {
  // E_k(Lambda) lies in the permutation algebra, so it commutes with every
  // P(pi).
  const int k = 3, d = 2;
  const auto E = twirl::twirl_projector(fixture_spectrum(d, 3), k);
  for (const auto& pi : symgroup::enumerate_permutations(k)) {
    const auto P = symgroup::permutation_operator(pi, d);
    CHECK((E * P - P * E).norm() < 1e-10);
  }
}

TEST_CASE("trace of the twirl is preserved") {
  // Tr E_k(Lambda) = Tr Lambda^{(x) k} = 1.
  for (int d = 2; d <= 3; ++d) {
    for (int k = 2; k <= 4; ++k) {
      const auto E = twirl::twirl_projector(fixture_spectrum(d, 4), k);
      CHECK(E.trace() == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("pure spectrum collapses the twirl onto the symmetric subspace") {
  for (int d = 2; d <= 3; ++d) {
    for (int k = 2; k <= 3; ++k) {
      const auto deltas = twirl::delta_coefficients(Spectrum::pure(d), k);
      for (const auto& [la, v] : deltas.value) {
        if (la.rows() == 1) {
          const auto dm = symgroup::dims(la, d);
          CHECK(v == doctest::Approx(1.0 / dm.dimQ).epsilon(1e-12));
        } else {
          CHECK(std::abs(v) < 1e-14);
        }
      }
      const auto E = twirl::twirl_projector(Spectrum::pure(d), k);
      CHECK((E - twirl::pure_moment(k, d)).norm() < 1e-10);
    }
  }
}

TEST_CASE("maximally mixed spectrum twirls to I/d^k") {
  const int d = 3, k = 2;
  const auto E = twirl::twirl_projector(Spectrum::uniform(d), k);
  const long side = symgroup::tensor_side(d, k);
  CHECK((E - Eigen::MatrixXd::Identity(side, side) / side).norm() < 1e-12);
}

TEST_CASE("moment-substituted deltas match both routes exactly over Q") {
  // Rational moments of an arbitrary fixture, with <t2^2> != <t2>^2.
  const Rational t2(3, 7), t2sq(2, 9), t3(1, 5), t4(1, 11);
  for (int d = 2; d <= 6; ++d) {
    for (const auto& la : symgroup::partitions_of(4)) {
      const auto a = twirl::delta_trace_ratio_moments<Rational>(
          la, d, t2, t2sq, t3, t4);
      const auto b = twirl::delta_closed_form_moments<Rational>(
          la, d, t2, t2sq, t3, t4);
      CHECK(a == b);
    }
  }
}

TEST_CASE("pure_moment is the normalized symmetric projector") {
  const int k = 2, d = 2;
  const auto M = twirl::pure_moment(k, d);
  CHECK(M.trace() == doctest::Approx(1.0));
  // Integral of |psi><psi|^{(x)2} over qubit pure states: the projector
  // onto the triplet divided by 3.
  CHECK((M * 3.0 -
         symgroup::central_projectors(2, 2).projectors.at(Partition{{2}}))
            .norm() < 1e-12);
}
