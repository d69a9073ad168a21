#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "haarmoment/closedforms.hpp"
#include "haarmoment/functionals.hpp"
#include "haarmoment/sampling.hpp"

namespace haarmoment::montecarlo {

using functionals::DensityMatrix;
using functionals::Observable;
using sampling::SeededStream;
using twirl::Spectrum;

// ---------------------------------------------------------------------------
// Streaming moments: Welford updates within a block, Chan's pairwise
// combination across blocks. Both are exact recurrences, so serial and
// parallel execution produce the same result as long as block contents and
// merge order are fixed.
// ---------------------------------------------------------------------------

struct Accumulator {
  long long n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }

  void merge(const Accumulator& other) {
    if (other.n == 0) return;
    if (n == 0) {
      *this = other;
      return;
    }
    const double delta = other.mean - mean;
    const long long total = n + other.n;
    mean += delta * static_cast<double>(other.n) / static_cast<double>(total);
    m2 += other.m2 + delta * delta * static_cast<double>(n) *
                         static_cast<double>(other.n) /
                         static_cast<double>(total);
    n = total;
  }

  // Unbiased sample variance.
  double variance() const {
    if (n < 2) throw std::logic_error("variance needs n >= 2");
    return m2 / static_cast<double>(n - 1);
  }
};

struct EstimateResult {
  double mean = 0.0;
  double std_error = 0.0;
  long long n = 0;
  std::optional<double> target;
  std::optional<double> z;  // (mean - target)/std_error
};

// Samples are organized in fixed blocks of this size; block b of a run
// always consumes stream (seed, stream_base + b) in full. The partition is
// therefore a function of n alone, and results are bit-identical for any
// worker count.
inline constexpr long long kBlockSize = 4096;

// Distance between the stream_base values of independent estimation runs
// sharing one seed; any n below kBlockSize * kStreamStride keeps them
// disjoint.
inline constexpr std::uint64_t kStreamStride = 1ULL << 32;

// One-pass Monte-Carlo estimate of E[f] where f consumes a stream to
// produce one sample. Evaluator failures are rethrown with the global
// sample index attached.
template <typename F>
EstimateResult estimate(F&& f, long long n, std::uint64_t seed,
                        std::uint64_t stream_base, int threads,
                        std::optional<double> target = std::nullopt) {
  if (n < 2) throw std::invalid_argument("estimate needs n >= 2");
  if (threads < 1) threads = 1;
  const long long blocks = (n + kBlockSize - 1) / kBlockSize;
  std::vector<Accumulator> acc(static_cast<std::size_t>(blocks));

  auto run_block = [&](long long b) {
    SeededStream s(seed, stream_base + static_cast<std::uint64_t>(b));
    const long long begin = b * kBlockSize;
    const long long count = std::min<long long>(kBlockSize, n - begin);
    Accumulator a;
    for (long long i = 0; i < count; ++i) {
      try {
        a.add(f(s));
      } catch (const std::exception& e) {
        throw std::runtime_error("evaluator failed at sample " +
                                 std::to_string(begin + i) + ": " + e.what());
      }
    }
    acc[static_cast<std::size_t>(b)] = a;
  };

  if (threads == 1 || blocks == 1) {
    for (long long b = 0; b < blocks; ++b) run_block(b);
  } else {
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w) {
      workers.emplace_back([&, w] {
        try {
          for (long long b = w; b < blocks; b += threads) run_block(b);
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    }
    for (auto& t : workers) t.join();
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  Accumulator total;
  for (const auto& a : acc) total.merge(a);  // fixed order: deterministic

  EstimateResult r;
  r.mean = total.mean;
  r.std_error = std::sqrt(total.variance() / static_cast<double>(total.n));
  r.n = total.n;
  if (target) {
    r.target = target;
    r.z = r.std_error > 0.0 ? (r.mean - *target) / r.std_error
                            : (r.mean == *target ? 0.0
                                                 : std::numeric_limits<
                                                       double>::infinity());
  }
  return r;
}

// ---------------------------------------------------------------------------
// Fast single-draw evaluators for the two functionals of interest.
// ---------------------------------------------------------------------------

namespace detail {

// Precomputed operator products shared by every sample of a run.
struct PairContext {
  Eigen::MatrixXcd a, b, a2, b2, anti;  // anti = (AB + BA)/2
  Eigen::MatrixXcd comm;                // comm = (AB - BA)
  explicit PairContext(const Observable& A, const Observable& B)
      : a(A.matrix),
        b(B.matrix),
        a2(A.matrix * A.matrix),
        b2(B.matrix * B.matrix),
        anti((A.matrix * B.matrix + B.matrix * A.matrix) / 2.0),
        comm(A.matrix * B.matrix - B.matrix * A.matrix) {}
};

inline double product_of(const PairContext& c, const Eigen::MatrixXcd& rho) {
  return functionals::variance_fast(c.a, c.a2, rho) *
         functionals::variance_fast(c.b, c.b2, rho);
}

inline double bound_of(const PairContext& c, const Eigen::MatrixXcd& rho) {
  const double ea = (c.a * rho).trace().real();
  const double eb = (c.b * rho).trace().real();
  const double cov = (c.anti * rho).trace().real() - ea * eb;
  const double comm = 0.5 * (c.comm * rho).trace().imag();
  return cov * cov + comm * comm;
}

inline Eigen::MatrixXcd pure_projector(int d, SeededStream& s) {
  const Eigen::VectorXcd psi = sampling::haar_pure_state(d, s);
  return psi * psi.adjoint();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Exact-vs-sampled comparison table.
// ---------------------------------------------------------------------------

struct NamedEstimate {
  std::string quantity;
  EstimateResult estimate;
};

// Estimates the five ensemble averages and attaches the closed-form targets:
// pure product / pure bound (u, l), Hilbert-Schmidt product / bound
// (omega_bar, beta_prime; low-dimension vectors at d = 2, 3), and the
// isospectral product at the given spectrum.
inline std::vector<NamedEstimate> compare_all(const Observable& A,
                                              const Observable& B,
                                              const Spectrum& lambda,
                                              long long n, std::uint64_t seed,
                                              int threads) {
  const int d = A.d();
  if (B.d() != d || lambda.d() != d)
    throw std::invalid_argument("dimension mismatch");
  const auto omega = functionals::omega_vector(A, B);
  const auto pure = closedforms::pure_coefficients(d);
  double hs_product_target, hs_bound_target;
  if (d <= 3) {
    const auto low = closedforms::lowdim_coefficients(d);
    hs_product_target = closedforms::assemble_average(low.product, omega);
    hs_bound_target = closedforms::assemble_average(low.bound, omega);
  } else {
    hs_product_target =
        closedforms::assemble_average(closedforms::omega_bar(d), omega);
    hs_bound_target = closedforms::assemble_average(
        closedforms::lower_bound_coefficients(d).beta_prime, omega);
  }
  const double iso_target =
      closedforms::assemble_average(closedforms::omega_iso(lambda), omega);

  const detail::PairContext ctx(A, B);
  const Spectrum lam = lambda;
  std::vector<NamedEstimate> rows;
  std::uint64_t base = 0;
  auto push = [&](const std::string& name, auto&& f, double target) {
    rows.push_back(
        {name, estimate(f, n, seed, base, threads, target)});
    base += kStreamStride;
  };
  push("pure_product",
       [&, d](SeededStream& s) {
         return detail::product_of(ctx, detail::pure_projector(d, s));
       },
       closedforms::assemble_average(pure.u, omega));
  push("pure_bound",
       [&, d](SeededStream& s) {
         return detail::bound_of(ctx, detail::pure_projector(d, s));
       },
       closedforms::assemble_average(pure.l, omega));
  push("hs_product",
       [&, d](SeededStream& s) {
         return detail::product_of(ctx, sampling::hs_density(d, s).matrix);
       },
       hs_product_target);
  push("hs_bound",
       [&, d](SeededStream& s) {
         return detail::bound_of(ctx, sampling::hs_density(d, s).matrix);
       },
       hs_bound_target);
  push("iso_product",
       [&](SeededStream& s) {
         return detail::product_of(ctx, sampling::isospectral(lam, s).matrix);
       },
       iso_target);
  return rows;
}

// ---------------------------------------------------------------------------
// Concentration-of-measure experiments.
// ---------------------------------------------------------------------------

struct ConcentrationReport {
  std::string ensemble;      // "iso", "pure", or "hs"
  double scale = 0.0;        // ||A||_inf^2 ||B||_inf^2 (epsilon unit)
  double mean = 0.0;         // closed-form ensemble mean
  long long n = 0;
  std::vector<double> epsilon;
  std::vector<double> upper_freq;  // Pr{f - mean >= eps}
  std::vector<double> lower_freq;  // Pr{f - mean <= -eps}
  std::vector<double> bound;       // theoretical bound per epsilon
  bool two_sided_bound = false;    // bound covers upper+lower if true

  bool valid_at(std::size_t i, double slack) const {
    const double freq = two_sided_bound ? upper_freq[i] + lower_freq[i]
                                        : std::max(upper_freq[i],
                                                   lower_freq[i]);
    return freq <= bound[i] + slack;
  }

  // Binomial standard error of the (two-sided) empirical frequency.
  double freq_se(std::size_t i) const {
    const double p = two_sided_bound
                         ? upper_freq[i] + lower_freq[i]
                         : std::max(upper_freq[i], lower_freq[i]);
    return std::sqrt(std::max(p * (1.0 - p), 1.0 / n) / n);
  }
};

inline std::vector<double> default_epsilon_grid(const Observable& A,
                                                const Observable& B) {
  const double scale = A.operator_norm() * A.operator_norm() *
                       B.operator_norm() * B.operator_norm();
  return {0.05 * scale, 0.1 * scale, 0.2 * scale, 0.4 * scale, 0.8 * scale};
}

namespace detail {

template <typename Draw>
ConcentrationReport tails(const std::string& tag, const Observable& A,
                          const Observable& B, double mean, long long n,
                          const std::vector<double>& eps, SeededStream& s,
                          Draw&& draw) {
  ConcentrationReport r;
  r.ensemble = tag;
  r.scale = A.operator_norm() * A.operator_norm() * B.operator_norm() *
            B.operator_norm();
  r.mean = mean;
  r.n = n;
  r.epsilon = eps;
  r.upper_freq.assign(eps.size(), 0.0);
  r.lower_freq.assign(eps.size(), 0.0);
  const PairContext ctx(A, B);
  for (long long i = 0; i < n; ++i) {
    const double f = product_of(ctx, draw(s));
    for (std::size_t j = 0; j < eps.size(); ++j) {
      if (f - mean >= eps[j]) r.upper_freq[j] += 1.0;
      if (f - mean <= -eps[j]) r.lower_freq[j] += 1.0;
    }
  }
  for (std::size_t j = 0; j < eps.size(); ++j) {
    r.upper_freq[j] /= static_cast<double>(n);
    r.lower_freq[j] /= static_cast<double>(n);
  }
  return r;
}

}  // namespace detail

// Tail frequencies of the product functional over the isospectral orbit of
// Lambda against the per-side bound exp(-d eps^2 / (4096 ||A||^4 ||B||^4)).
inline ConcentrationReport concentration_iso(const Spectrum& lambda,
                                             const Observable& A,
                                             const Observable& B, long long n,
                                             const std::vector<double>& eps,
                                             SeededStream& s) {
  if (n < 1000) throw std::invalid_argument("concentration needs n >= 1000");
  const int d = lambda.d();
  const double mean = closedforms::assemble_average(
      closedforms::omega_iso(lambda), functionals::omega_vector(A, B));
  auto r = detail::tails("iso", A, B, mean, n, eps, s,
                         [&](SeededStream& st) {
                           return sampling::isospectral(lambda, st).matrix;
                         });
  r.two_sided_bound = false;
  r.bound.resize(eps.size());
  for (std::size_t j = 0; j < eps.size(); ++j)
    r.bound[j] =
        std::exp(-d * eps[j] * eps[j] / (4096.0 * r.scale * r.scale));
  return r;
}

// Tail frequencies over Haar pure states against the two-sided bound
// 2 exp(-d eps^2 / (1296 pi^3 ln2 ||A||^4 ||B||^4)).
inline ConcentrationReport concentration_pure(const Observable& A,
                                              const Observable& B,
                                              long long n,
                                              const std::vector<double>& eps,
                                              SeededStream& s) {
  if (n < 1000) throw std::invalid_argument("concentration needs n >= 1000");
  const int d = A.d();
  const double mean = closedforms::assemble_average(
      closedforms::pure_coefficients(d).u, functionals::omega_vector(A, B));
  auto r = detail::tails("pure", A, B, mean, n, eps, s,
                         [&, d](SeededStream& st) {
                           return detail::pure_projector(d, st);
                         });
  r.two_sided_bound = true;
  r.bound.resize(eps.size());
  const double c = 1296.0 * std::pow(std::numbers::pi, 3) * std::numbers::ln2;
  for (std::size_t j = 0; j < eps.size(); ++j)
    r.bound[j] = 2.0 * std::exp(-d * eps[j] * eps[j] / (c * r.scale * r.scale));
  return r;
}

// Hilbert-Schmidt variant: the exponent carries d^2 in place of d (the
// underlying sphere is that of C^d (x) C^d).
inline ConcentrationReport concentration_hs(const Observable& A,
                                            const Observable& B, long long n,
                                            const std::vector<double>& eps,
                                            SeededStream& s) {
  if (n < 1000) throw std::invalid_argument("concentration needs n >= 1000");
  const int d = A.d();
  double mean;
  const auto omega = functionals::omega_vector(A, B);
  if (d <= 3) {
    mean = closedforms::assemble_average(
        closedforms::lowdim_coefficients(d).product, omega);
  } else {
    mean = closedforms::assemble_average(closedforms::omega_bar(d), omega);
  }
  auto r = detail::tails("hs", A, B, mean, n, eps, s,
                         [&, d](SeededStream& st) {
                           return sampling::hs_density(d, st).matrix;
                         });
  r.two_sided_bound = true;
  r.bound.resize(eps.size());
  const double c = 1296.0 * std::pow(std::numbers::pi, 3) * std::numbers::ln2;
  for (std::size_t j = 0; j < eps.size(); ++j)
    r.bound[j] = 2.0 * std::exp(-static_cast<double>(d) * d * eps[j] *
                                eps[j] / (c * r.scale * r.scale));
  return r;
}

// ---------------------------------------------------------------------------
// Residual scan for the pure-state a.e. equality product = bound at d = 2.
// ---------------------------------------------------------------------------

struct ResidualHistogram {
  double min = 0.0;
  double median = 0.0;
  double max = 0.0;
  double lo = 0.0;  // range covered by the bins
  double hi = 0.0;
  std::vector<long long> counts;
};

// Histogram of product - bound over Haar pure states. The residual is
// nonnegative up to roundoff everywhere; at d = 2 it vanishes identically.
inline ResidualHistogram residual_scan(const Observable& A,
                                       const Observable& B, long long n,
                                       SeededStream& s, int bins = 40) {
  const int d = A.d();
  if (B.d() != d) throw std::invalid_argument("dimension mismatch");
  const detail::PairContext ctx(A, B);
  std::vector<double> residuals(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) {
    const Eigen::MatrixXcd rho = detail::pure_projector(d, s);
    residuals[static_cast<std::size_t>(i)] =
        detail::product_of(ctx, rho) - detail::bound_of(ctx, rho);
  }
  std::sort(residuals.begin(), residuals.end());
  ResidualHistogram h;
  h.min = residuals.front();
  h.max = residuals.back();
  h.median = residuals[residuals.size() / 2];
  h.lo = h.min;
  h.hi = h.max > h.min ? h.max : h.min + 1.0;
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  for (double x : residuals) {
    auto b = static_cast<std::size_t>((x - h.lo) / (h.hi - h.lo) * bins);
    if (b >= h.counts.size()) b = h.counts.size() - 1;
    ++h.counts[b];
  }
  return h;
}

}  // namespace haarmoment::montecarlo
