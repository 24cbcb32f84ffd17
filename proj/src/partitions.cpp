#include "permoments/partitions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

#include "permoments/errors.hpp"

namespace permoments {

Partition::Partition(std::vector<int> parts) : parts_(std::move(parts)) {
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (parts_[i] < 1)
      throw std::invalid_argument("partition parts must be positive");
    if (i > 0 && parts_[i] > parts_[i - 1])
      throw std::invalid_argument("partition parts must be weakly decreasing");
  }
  size_ = std::accumulate(parts_.begin(), parts_.end(), 0);
}

std::vector<std::pair<int, int>> Partition::multiplicities() const {
  std::vector<std::pair<int, int>> out;
  for (int p : parts_) {
    if (!out.empty() && out.back().first == p)
      ++out.back().second;
    else
      out.emplace_back(p, 1);
  }
  return out;
}

int Partition::multiplicity(int r) const {
  return static_cast<int>(std::count(parts_.begin(), parts_.end(), r));
}

// Zoghbi-Stojmenovic ZS1: reverse lexicographic order.
PartitionGenerator::PartitionGenerator(int n) : n_(n) {
  if (n < 0) throw std::invalid_argument("partitions of a negative integer");
  parts_.assign(std::max(n, 1), 1);
}

bool PartitionGenerator::next() {
  if (done_) return false;
  if (!started_) {
    started_ = true;
    if (n_ == 0) {
      length_ = 0;
      return true;
    }
    parts_[0] = n_;
    length_ = 1;
    last_big_ = 0;
    return true;
  }
  if (n_ == 0 || parts_[0] == 1) {
    done_ = true;
    return false;
  }
  std::size_t m = length_ - 1;  // index of the last part
  std::size_t h = last_big_;
  if (parts_[h] == 2) {
    ++m;
    parts_[h] = 1;
    // h may become "-1" only when parts_[0] == 2, in which case all parts are
    // now 1 and the next call terminates.
    h = (h == 0) ? 0 : h - 1;
  } else {
    const int r = parts_[h] - 1;
    int t = static_cast<int>(m - h) + 1;
    parts_[h] = r;
    while (t >= r) {
      ++h;
      parts_[h] = r;
      t -= r;
    }
    if (t == 0) {
      m = h;
    } else {
      m = h + 1;
      if (t > 1) {
        ++h;
        parts_[h] = t;
      }
    }
  }
  length_ = m + 1;
  last_big_ = h;
  // parts beyond the active length are 1 by construction of ZS1
  for (std::size_t i = h + 1; i < length_; ++i) parts_[i] = 1;
  return true;
}

std::vector<Partition> partitions_of(int n) {
  std::vector<Partition> out;
  PartitionGenerator gen(n);
  while (gen.next())
    out.emplace_back(std::vector<int>(gen.parts().begin(), gen.parts().end()));
  return out;
}

BigInt z_weight(const Partition& lambda) {
  BigInt z = 1;
  for (auto [r, c] : lambda.multiplicities()) {
    for (int i = 0; i < c; ++i) z *= r;
    for (int i = 2; i <= c; ++i) z *= i;
  }
  return z;
}

BigInt class_size(const Partition& lambda) {
  BigInt fact = 1;
  for (int i = 2; i <= lambda.size(); ++i) fact *= i;
  const BigInt z = z_weight(lambda);
  if (fact % z != 0) throw std::logic_error("n!/z_lambda is not an integer");
  return fact / z;
}

double class_probability(std::span<const int> parts) {
  double w = 1.0;
  std::size_t i = 0;
  while (i < parts.size()) {
    const int r = parts[i];
    int c = 0;
    while (i < parts.size() && parts[i] == r) {
      ++c;
      ++i;
    }
    for (int j = 1; j <= c; ++j) w /= static_cast<double>(r) * j;
  }
  return w;
}

namespace {

// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(cplx v) {
    add_part(sum_re_, comp_re_, v.real());
    add_part(sum_im_, comp_im_, v.imag());
  }
  cplx value() const { return {sum_re_ + comp_re_, sum_im_ + comp_im_}; }

 private:
  static void add_part(double& sum, double& comp, double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }
  double sum_re_ = 0.0, comp_re_ = 0.0, sum_im_ = 0.0, comp_im_ = 0.0;
};

// a_r = prod_k (1 - x_k^r)^{s_k} for r = 1..n (index 0 unused).
std::vector<cplx> cycle_factors(const MomentQuery& q,
                                const std::optional<std::vector<int>>& ints) {
  const std::size_t n = q.n;
  std::vector<cplx> a(n + 1, 1.0);
  for (std::size_t k = 0; k < q.arity(); ++k) {
    cplx power = 1.0;
    for (std::size_t r = 1; r <= n; ++r) {
      power *= q.xs[k];
      const cplx w = 1.0 - power;
      a[r] *= ints ? int_pow(w, (*ints)[k]) : principal_pow(w, q.ss[k]);
    }
  }
  return a;
}

}  // namespace

cplx exact_moment_partition_sum(const MomentQuery& q) {
  q.validate();
  if (q.n > kPartitionSumMaxN)
    throw DomainError("partition sum supports n <= " +
                      std::to_string(kPartitionSumMaxN) + ", got " +
                      std::to_string(q.n));
  const auto ints = q.integer_exponents();
  const double norm = q.norm();
  if (ints ? norm > 1.0 + 1e-12 : norm >= 1.0)
    throw DomainError(ints ? "partition sum needs ||x|| <= 1"
                           : "complex exponents need ||x|| < 1");
  if (q.n == 0) return 1.0;

  const auto a = cycle_factors(q, ints);
  CompensatedSum total;
  PartitionGenerator gen(static_cast<int>(q.n));
  while (gen.next()) {
    const auto parts = gen.parts();
    cplx term = class_probability(parts);
    std::size_t i = 0;
    while (i < parts.size()) {
      const int r = parts[i];
      int c = 0;
      while (i < parts.size() && parts[i] == r) {
        ++c;
        ++i;
      }
      term *= int_pow(a[r], c);
    }
    total.add(term);
  }
  return total.value();
}

cplx brute_force_moment(const MomentQuery& q) {
  q.validate();
  if (q.n > kBruteForceMaxN)
    throw DomainError("brute force supports n <= " +
                      std::to_string(kBruteForceMaxN));
  const auto ints = q.integer_exponents();
  if (!ints)
    throw std::invalid_argument("brute force needs nonnegative integer s");
  const int n = static_cast<int>(q.n);
  if (n == 0) return 1.0;

  std::vector<int> sigma(n);
  std::iota(sigma.begin(), sigma.end(), 0);
  Eigen::MatrixXcd m(n, n);
  cplx sum = 0.0;
  long long count = 0;
  do {
    cplx value = 1.0;
    for (std::size_t k = 0; k < q.arity(); ++k) {
      // I - x P with P_{i, sigma(j)} = 1 (column j maps to row sigma(j)).
      m.setIdentity();
      for (int j = 0; j < n; ++j) m(sigma[j], j) -= q.xs[k];
      const cplx det = m.partialPivLu().determinant();
      value *= int_pow(det, (*ints)[k]);
    }
    sum += value;
    ++count;
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return sum / static_cast<double>(count);
}

}  // namespace permoments
