#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "permoments/moment_query.hpp"

namespace permoments {

using BigInt = boost::multiprecision::cpp_int;

// Largest n accepted by the partition-sum evaluator; p(60) = 966467.
inline constexpr std::size_t kPartitionSumMaxN = 60;
// Largest n accepted by the determinant oracle; 8! = 40320 matrices.
inline constexpr std::size_t kBruteForceMaxN = 8;

// An integer partition: weakly decreasing positive parts.
class Partition {
 public:
  Partition() = default;
  // Throws std::invalid_argument if parts are not weakly decreasing and
  // positive.
  explicit Partition(std::vector<int> parts);

  const std::vector<int>& parts() const { return parts_; }
  int size() const { return size_; }
  std::size_t length() const { return parts_.size(); }

  // (r, c_r) for each distinct part r, in decreasing r.
  std::vector<std::pair<int, int>> multiplicities() const;

  // Number of parts equal to r.
  int multiplicity(int r) const;

  bool operator==(const Partition&) const = default;

 private:
  std::vector<int> parts_;
  int size_ = 0;
};

// Streams the partitions of n in descending lexicographic order, starting at
// (n) and ending at (1,...,1). n = 0 yields the empty partition once.
class PartitionGenerator {
 public:
  explicit PartitionGenerator(int n);

  // Advances to the next partition. Returns false once exhausted. The first
  // call positions the generator on the first partition.
  bool next();

  // Parts of the current partition; valid until the next call to next().
  std::span<const int> parts() const { return {parts_.data(), length_}; }

 private:
  int n_;
  std::vector<int> parts_;
  std::size_t length_ = 0;
  std::size_t last_big_ = 0;  // index of the last part > 1
  bool started_ = false;
  bool done_ = false;
};

std::vector<Partition> partitions_of(int n);

// z_lambda = prod_r r^{c_r} c_r!, exact.
BigInt z_weight(const Partition& lambda);

// |C_lambda| = n! / z_lambda; throws std::logic_error if the division is not
// exact (never expected).
BigInt class_size(const Partition& lambda);

// 1 / z_lambda in double precision, for the hot summation loop.
double class_probability(std::span<const int> parts);

// sum_{lambda |- n} (1/z_lambda) prod_k prod_m (1 - x_k^{lambda_m})^{s_k}.
// Integer exponents allow ||x|| <= 1; other exponents need ||x|| < 1 and use
// the principal branch. Returns 1 for n = 0. Throws DomainError for
// n > kPartitionSumMaxN or for complex exponents with ||x|| >= 1.
cplx exact_moment_partition_sum(const MomentQuery& q);

// Average of prod_k det(I - x_k P)^{s_k} over all n! permutation matrices P,
// with the determinant taken numerically from the matrix. Integer exponents
// only, n <= kBruteForceMaxN.
cplx brute_force_moment(const MomentQuery& q);

}  // namespace permoments
