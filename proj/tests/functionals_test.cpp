#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "haarmoment/closedforms.hpp"
#include "haarmoment/functionals.hpp"
#include "haarmoment/sampling.hpp"

using namespace haarmoment;
using functionals::DensityMatrix;
using functionals::Observable;

TEST_CASE("observable validation and builtins") {
  Eigen::MatrixXcd bad(2, 2);
  bad << 1, std::complex<double>(0, 1), std::complex<double>(0, 1), 1;
  CHECK_THROWS(Observable(bad));
  for (int i = 0; i < 3; ++i) {
    const auto s = Observable::pauli(i);
    CHECK((s.matrix * s.matrix -
           Eigen::MatrixXcd::Identity(2, 2)).norm() < 1e-15);
    CHECK(s.operator_norm() == doctest::Approx(1.0));
  }
  for (int i = 1; i <= 8; ++i) {
    const auto g = Observable::gell_mann(i);
    CHECK(g.matrix.trace().real() == doctest::Approx(0.0));
    CHECK((g.matrix * g.matrix).trace().real() == doctest::Approx(2.0));
  }
}

TEST_CASE("density matrix validation") {
  CHECK_THROWS(DensityMatrix(Eigen::MatrixXcd::Identity(2, 2)));  // trace 2
  Eigen::MatrixXcd bad(2, 2);
  bad << 1.5, 0, 0, -0.5;  // trace 1 but not PSD
  CHECK_THROWS(DensityMatrix(bad));
  const auto mm = DensityMatrix::maximally_mixed(3);
  CHECK(mm.matrix.trace().real() == doctest::Approx(1.0));
}

TEST_CASE("expectation and variance basics") {
  const auto sz = Observable::pauli(2);
  Eigen::VectorXcd up(2);
  up << 1, 0;
  const auto rho = DensityMatrix::pure(up);
  CHECK(functionals::expectation(sz, rho) == doctest::Approx(1.0));
  CHECK(functionals::variance(sz, rho) == doctest::Approx(0.0));
  const auto mixed = DensityMatrix::maximally_mixed(2);
  CHECK(functionals::expectation(sz, mixed) == doctest::Approx(0.0));
  CHECK(functionals::variance(sz, mixed) == doctest::Approx(1.0));
}

TEST_CASE("product functional and lower bound on random states") {
  sampling::SeededStream s(101, 0);
  for (int d = 2; d <= 4; ++d) {
    const auto A = sampling::random_hermitian(d, s);
    const auto B = sampling::random_hermitian(d, s);
    for (int i = 0; i < 200; ++i) {
      const auto rho = sampling::hs_density(d, s);
      const double prod = functionals::product_functional(A, B, rho);
      const double l0 = functionals::lower_bound_L0(A, B, rho);
      CHECK(prod >= l0 - 1e-9);  // Robertson-Schrodinger
      CHECK(prod >= -1e-12);
      CHECK(l0 >= -1e-12);
    }
  }
}

TEST_CASE("qubit pure states saturate the bound") {
  const auto A = Observable::pauli(0);
  const auto B = Observable::pauli(1);
  sampling::SeededStream s(7, 3);
  for (int i = 0; i < 500; ++i) {
    const auto rho = DensityMatrix::pure(sampling::haar_pure_state(2, s));
    const double prod = functionals::product_functional(A, B, rho);
    const double l0 = functionals::lower_bound_L0(A, B, rho);
    CHECK(std::abs(prod - l0) < 1e-10);
  }
}

TEST_CASE("A = B collapses the bound to the squared variance") {
  sampling::SeededStream s(19, 0);
  const auto A = sampling::random_hermitian(3, s);
  for (int i = 0; i < 100; ++i) {
    const auto rho = sampling::hs_density(3, s);
    const double v = functionals::variance(A, rho);
    CHECK(functionals::lower_bound_L0(A, A, rho) ==
          doctest::Approx(v * v).epsilon(1e-9));
  }
}

TEST_CASE("omega vector: Pauli and identity values") {
  const auto pauli_omega =
      functionals::omega_vector(Observable::pauli(0), Observable::pauli(1));
  const std::array<double, 8> expected{0, 0, 0, 4, 0, 0, 2, -2};
  for (int j = 1; j <= 8; ++j)
    CHECK(pauli_omega[j] == doctest::Approx(expected[j - 1]).epsilon(1e-14));

  const auto id_omega = functionals::omega_vector(Observable::identity(2),
                                                  Observable::identity(2));
  const std::array<double, 8> expected_id{16, 16, 8, 4, 4, 8, 2, 2};
  for (int j = 1; j <= 8; ++j)
    CHECK(id_omega[j] == doctest::Approx(expected_id[j - 1]).epsilon(1e-14));
}

TEST_CASE("omega sign facts over random pairs") {
  // Omega_j >= 0 for j in {1,2,4,5,7} and Omega_7 + Omega_8 >= 0 always
  // (Tr[(AB+BA)^2]/2 >= 0). Omega_8 alone can be negative: the Pauli pair
  // is a witness, so no global sign is asserted for it.
  sampling::SeededStream s(23, 0);
  for (int d = 2; d <= 5; ++d) {
    for (int i = 0; i < 500; ++i) {
      const auto A = sampling::random_hermitian(d, s);
      const auto B = sampling::random_hermitian(d, s);
      const auto o = functionals::omega_vector(A, B);
      for (int j : {1, 2, 4, 5, 7}) CHECK(o[j] >= -1e-10);
      CHECK(o[7] + o[8] >= -1e-10);
    }
  }
  const auto pauli_omega =
      functionals::omega_vector(Observable::pauli(0), Observable::pauli(1));
  CHECK(pauli_omega[8] < 0.0);  // the witness
}

TEST_CASE("pure trace inequality reports both sides") {
  // (sigma_x, sigma_y) is an equality case: 2*0 + 2*4 + 4*(-2) = 0 = 0 + 2*0.
  const auto r = functionals::trace_inequality_pure(Observable::pauli(0),
                                                    Observable::pauli(1));
  CHECK(r.lhs == doctest::Approx(0.0));
  CHECK(r.rhs == doctest::Approx(0.0));
  CHECK(r.holds);
  // A = B = I at d = 2: Omega = (16,16,8,4,4,8,2,2), strict inequality.
  const auto ri = functionals::trace_inequality_pure(Observable::identity(2),
                                                     Observable::identity(2));
  CHECK(ri.lhs == doctest::Approx(2.0 * 8 + 2.0 * 4 + 4.0 * 2));
  CHECK(ri.rhs == doctest::Approx(16 + 2.0 * 4));
  CHECK(ri.holds);
}

TEST_CASE("mixed difference is nonnegative across dimensions") {
  sampling::SeededStream s(31, 0);
  for (int d = 2; d <= 6; ++d) {
    for (int i = 0; i < 200; ++i) {
      const auto A = sampling::random_hermitian(d, s);
      const auto B = sampling::random_hermitian(d, s);
      CHECK(functionals::mixed_difference(A, B, d) >= -1e-9);
    }
  }
  const auto I = Observable::identity(4);
  CHECK(functionals::mixed_difference(I, I, 4) == doctest::Approx(0.0));
}

TEST_CASE("freeness deviations shrink for GUE pairs") {
  sampling::SeededStream s(47, 0);
  auto median_dev = [&](int d) {
    std::vector<double> total;
    for (int i = 0; i < 8; ++i) {
      const auto A = sampling::gue(d, s);
      const auto B = sampling::gue(d, s);
      const auto r = functionals::freeness_diagnostic(A, B);
      double m = 0.0;
      for (double x : r.deviations) m += x;
      total.push_back(m);
    }
    std::sort(total.begin(), total.end());
    return total[total.size() / 2];
  };
  CHECK(median_dev(48) < median_dev(12));
}
