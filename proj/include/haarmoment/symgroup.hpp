#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "haarmoment/rational.hpp"

namespace haarmoment::symgroup {

inline constexpr int kMaxOrder = 4;

inline long factorial(int k) {
  long f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

// ---------------------------------------------------------------------------
// Permutations of {0..k-1}, k <= 4.
// ---------------------------------------------------------------------------

struct Permutation {
  std::vector<int> images;  // images[i] = pi(i)

  int order() const { return static_cast<int>(images.size()); }

  static Permutation identity(int k) {
    Permutation p;
    p.images.resize(k);
    std::iota(p.images.begin(), p.images.end(), 0);
    return p;
  }

  bool is_identity() const {
    for (int i = 0; i < order(); ++i)
      if (images[i] != i) return false;
    return true;
  }

  // (this * other)(i) = this(other(i))
  Permutation compose(const Permutation& other) const {
    if (order() != other.order())
      throw std::invalid_argument("permutation order mismatch");
    Permutation r;
    r.images.resize(order());
    for (int i = 0; i < order(); ++i) r.images[i] = images[other.images[i]];
    return r;
  }

  Permutation inverse() const {
    Permutation r;
    r.images.resize(order());
    for (int i = 0; i < order(); ++i) r.images[images[i]] = i;
    return r;
  }

  // Cycle lengths sorted descending; identifies the conjugacy class.
  std::vector<int> cycle_type() const {
    std::vector<int> type;
    std::vector<bool> seen(images.size(), false);
    for (int i = 0; i < order(); ++i) {
      if (seen[i]) continue;
      int len = 0, j = i;
      while (!seen[j]) {
        seen[j] = true;
        j = images[j];
        ++len;
      }
      type.push_back(len);
    }
    std::sort(type.rbegin(), type.rend());
    return type;
  }

  int cycle_count() const { return static_cast<int>(cycle_type().size()); }

  bool operator==(const Permutation& o) const { return images == o.images; }
  bool operator<(const Permutation& o) const { return images < o.images; }
};

inline std::vector<Permutation> enumerate_permutations(int k) {
  if (k < 1 || k > kMaxOrder)
    throw std::invalid_argument("unsupported order: k must be in 1..4");
  Permutation p = Permutation::identity(k);
  std::vector<Permutation> all;
  do {
    all.push_back(p);
  } while (std::next_permutation(p.images.begin(), p.images.end()));
  return all;  // lexicographic, identity first
}

// ---------------------------------------------------------------------------
// Partitions of k with hook-length dimensions.
// ---------------------------------------------------------------------------

struct Partition {
  std::vector<int> parts;  // weakly decreasing, positive

  int k() const {
    return std::accumulate(parts.begin(), parts.end(), 0);
  }
  int rows() const { return static_cast<int>(parts.size()); }

  bool valid() const {
    if (parts.empty()) return false;
    for (size_t i = 0; i < parts.size(); ++i) {
      if (parts[i] <= 0) return false;
      if (i > 0 && parts[i] > parts[i - 1]) return false;
    }
    return true;
  }

  bool operator==(const Partition& o) const { return parts == o.parts; }
  bool operator<(const Partition& o) const { return parts < o.parts; }
};

inline std::vector<Partition> partitions_of(int k) {
  if (k < 1 || k > kMaxOrder)
    throw std::invalid_argument("unsupported order: k must be in 1..4");
  switch (k) {
    case 1:
      return {{{1}}};
    case 2:
      return {{{2}}, {{1, 1}}};
    case 3:
      return {{{3}}, {{2, 1}}, {{1, 1, 1}}};
    default:
      return {{{4}}, {{3, 1}}, {{2, 2}}, {{2, 1, 1}}, {{1, 1, 1, 1}}};
  }
}

// Hook length of box (i,j), 0-based: arm + leg + 1.
inline int hook_length(const Partition& lambda, int i, int j) {
  int arm = lambda.parts[i] - j - 1;
  int leg = 0;
  for (size_t r = i + 1; r < lambda.parts.size(); ++r)
    if (lambda.parts[r] > j) ++leg;
  return arm + leg + 1;
}

struct IrrepDims {
  long dimQ;  // unitary-group irrep dimension (0 when rows > d)
  long dimP;  // symmetric-group irrep dimension
};

// Hook-length formulae: dimQ = prod (d + j - i)/h(i,j), dimP = k!/prod h.
inline IrrepDims dims(const Partition& lambda, int d) {
  if (!lambda.valid()) throw std::invalid_argument("invalid partition");
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  long hook_prod = 1;
  for (int i = 0; i < lambda.rows(); ++i)
    for (int j = 0; j < lambda.parts[i]; ++j) hook_prod *= hook_length(lambda, i, j);
  IrrepDims r;
  r.dimP = factorial(lambda.k()) / hook_prod;
  if (lambda.rows() > d) {
    r.dimQ = 0;
    return r;
  }
  long num = 1;
  for (int i = 0; i < lambda.rows(); ++i)
    for (int j = 0; j < lambda.parts[i]; ++j) num *= (d + j - i);
  r.dimQ = num / hook_prod;
  return r;
}

// ---------------------------------------------------------------------------
// Characters of S_k, k <= 4, stored per (partition, cycle type).
// Validated against orthogonality in the test suite.
// ---------------------------------------------------------------------------

inline int character(const Partition& lambda, const Permutation& pi) {
  const int k = lambda.k();
  if (k != pi.order())
    throw std::invalid_argument("partition/permutation order mismatch");
  if (k > kMaxOrder) throw std::invalid_argument("unsupported order");
  using Key = std::pair<std::vector<int>, std::vector<int>>;
  static const std::map<Key, int> table = [] {
    std::map<Key, int> t;
    auto put = [&t](std::vector<int> lam, std::vector<int> ct, int chi) {
      t[{std::move(lam), std::move(ct)}] = chi;
    };
    // k = 1
    put({1}, {1}, 1);
    // k = 2: classes 1^2, 2
    put({2}, {1, 1}, 1);
    put({2}, {2}, 1);
    put({1, 1}, {1, 1}, 1);
    put({1, 1}, {2}, -1);
    // k = 3: classes 1^3, 2.1, 3
    put({3}, {1, 1, 1}, 1);
    put({3}, {2, 1}, 1);
    put({3}, {3}, 1);
    put({2, 1}, {1, 1, 1}, 2);
    put({2, 1}, {2, 1}, 0);
    put({2, 1}, {3}, -1);
    put({1, 1, 1}, {1, 1, 1}, 1);
    put({1, 1, 1}, {2, 1}, -1);
    put({1, 1, 1}, {3}, 1);
    // k = 4: classes 1^4, 2.1^2, 2^2, 3.1, 4
    put({4}, {1, 1, 1, 1}, 1);
    put({4}, {2, 1, 1}, 1);
    put({4}, {2, 2}, 1);
    put({4}, {3, 1}, 1);
    put({4}, {4}, 1);
    put({3, 1}, {1, 1, 1, 1}, 3);
    put({3, 1}, {2, 1, 1}, 1);
    put({3, 1}, {2, 2}, -1);
    put({3, 1}, {3, 1}, 0);
    put({3, 1}, {4}, -1);
    put({2, 2}, {1, 1, 1, 1}, 2);
    put({2, 2}, {2, 1, 1}, 0);
    put({2, 2}, {2, 2}, 2);
    put({2, 2}, {3, 1}, -1);
    put({2, 2}, {4}, 0);
    put({2, 1, 1}, {1, 1, 1, 1}, 3);
    put({2, 1, 1}, {2, 1, 1}, -1);
    put({2, 1, 1}, {2, 2}, -1);
    put({2, 1, 1}, {3, 1}, 0);
    put({2, 1, 1}, {4}, 1);
    put({1, 1, 1, 1}, {1, 1, 1, 1}, 1);
    put({1, 1, 1, 1}, {2, 1, 1}, -1);
    put({1, 1, 1, 1}, {2, 2}, 1);
    put({1, 1, 1, 1}, {3, 1}, 1);
    put({1, 1, 1, 1}, {4}, -1);
    return t;
  }();
  auto it = table.find({lambda.parts, pi.cycle_type()});
  if (it == table.end()) throw std::logic_error("character table lookup failed");
  return it->second;
}

// ---------------------------------------------------------------------------
// Permutation operators P(pi) on (C^d)^{tensor k} and central projectors.
// Leg 0 is the leftmost (most significant) tensor factor;
// P(pi)|i_1...i_k> = |i_{pi^{-1}(1)}...i_{pi^{-1}(k)}>.
// Entries are 0/1 reals; callers cast to complex where needed.
// ---------------------------------------------------------------------------

inline long tensor_side(int d, int k) {
  long side = 1;
  for (int i = 0; i < k; ++i) {
    side *= d;
    if (side > 100000) throw std::length_error("d^k capacity guard exceeded");
  }
  return side;
}

inline Eigen::MatrixXd permutation_operator(const Permutation& pi, int d) {
  const int k = pi.order();
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  const long side = tensor_side(d, k);
  if (side > 4096) throw std::length_error("d^k capacity guard exceeded");
  const Permutation inv = pi.inverse();
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(side, side);
  std::vector<int> digits(k), permuted(k);
  for (long col = 0; col < side; ++col) {
    long c = col;
    for (int leg = k - 1; leg >= 0; --leg) {
      digits[leg] = static_cast<int>(c % d);
      c /= d;
    }
    for (int leg = 0; leg < k; ++leg) permuted[leg] = digits[inv.images[leg]];
    long row = 0;
    for (int leg = 0; leg < k; ++leg) row = row * d + permuted[leg];
    P(row, col) = 1.0;
  }
  return P;
}

struct CentralProjectorSet {
  int k;
  int d;
  // Only partitions with dimQ > 0 (rows <= d) are present.
  std::map<Partition, Eigen::MatrixXd> projectors;
};

// C_lambda = (dimP/k!) sum_pi chi_lambda(pi) P(pi)
inline CentralProjectorSet central_projectors(int k, int d) {
  if (k < 1 || k > kMaxOrder)
    throw std::invalid_argument("unsupported order: k must be in 1..4");
  const long side = tensor_side(d, k);
  CentralProjectorSet set{k, d, {}};
  const auto perms = enumerate_permutations(k);
  std::vector<Eigen::MatrixXd> ops;
  ops.reserve(perms.size());
  for (const auto& pi : perms) ops.push_back(permutation_operator(pi, d));
  const double kfac = static_cast<double>(factorial(k));
  for (const auto& lambda : partitions_of(k)) {
    const auto dm = dims(lambda, d);
    if (dm.dimQ == 0) continue;
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(side, side);
    for (size_t i = 0; i < perms.size(); ++i)
      C += static_cast<double>(character(lambda, perms[i])) * ops[i];
    C *= static_cast<double>(dm.dimP) / kfac;
    set.projectors.emplace(lambda, std::move(C));
  }
  return set;
}

// ---------------------------------------------------------------------------
// Weingarten function, exact over Q.
// Wg(pi) = (1/k!^2) sum_{lambda} dimP^2/dimQ * chi_lambda(pi).
// For d < k the sum is restricted to partitions with rows <= d.
// ---------------------------------------------------------------------------

inline Rational weingarten(const Permutation& pi, int d) {
  const int k = pi.order();
  if (k > kMaxOrder) throw std::invalid_argument("unsupported order");
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  Rational sum = 0;
  for (const auto& lambda : partitions_of(k)) {
    const auto dm = dims(lambda, d);
    if (dm.dimQ == 0) continue;
    sum += Rational(dm.dimP * dm.dimP * character(lambda, pi), dm.dimQ);
  }
  const long kfac = factorial(k);
  return sum / (Rational(kfac) * kfac);
}

}  // namespace haarmoment::symgroup
