#pragma once

#include <cstddef>
#include <span>
#include <stop_token>
#include <vector>

#include "permoments/moment_query.hpp"
#include "permoments/series.hpp"

namespace permoments {

// Hard cap on the multi-index box radius used by limit_complex.
inline constexpr int kLimitLatticeCap = 512;

// Factor pairs closer than this are treated as the same factor when the
// integer generating function is collected into a rational function.
inline constexpr double kFactorMergeTol = 1e-12;
// Distinct factors on the unit circle closer than this make the rational
// function numerically degenerate; construction is refused.
inline constexpr double kFactorCollisionTol = 1e-9;

// The factors (x^k, -binom(s,k)(-1)^{|k|}) over multi-indices 0 <= k <= s,
// in lexicographic order of k (so k = 0, the factor (1 - t)^{-1}, comes
// first). Requires nonnegative integer exponents.
FactorList integer_product_factors(std::span<const cplx> xs,
                                   std::span<const int> ss);

// E[Z_n^s(x)] as the n-th Taylor coefficient of the finite product
// generating function. Needs nonnegative integer s and ||x|| <= 1.
cplx gf_moment_integer(const MomentQuery& q);

// The same coefficient for a whole range 0..n; one recurrence pass.
std::vector<cplx> gf_moments_integer(std::span<const cplx> xs,
                                     std::span<const int> ss, std::size_t n);

// E[Z_n^s(x)] through the cycle index identity, exp(sum a_m t^m / m) with
// a_m = prod_j (1 - x_j^m)^{s_j}. Any complex s, ||x|| < 1.
cplx gf_moment_complex(const MomentQuery& q);

// lim_n E[Z_n^s(x)] for integer s: prod_{0 != k <= s} (1 - x^k)^{-binom(s,k)(-1)^{|k|}}.
cplx limit_integer(std::span<const cplx> xs, std::span<const int> ss);

struct LimitResult {
  cplx value;
  // Bound on the omitted part of the log-sum, i.e. on the relative error.
  double tail_bound = 0.0;
  int radius = 0;  // box radius K of the enumerated lattice
};

// lim_n E[Z_n^s(x)] for complex s. The log of the product is summed over
// the box 0 <= k_j <= K; K grows until both the tail bound and the
// contribution of the outermost shell are below tol/2.
//
// Tail bound: with y = ||x|| and B_j(y) = sum_k |binom(s_j,k)| y^k,
// the omitted log mass is at most
//   1/(1-y) * sum_j T_j(K) prod_{i != j} B_i(y),
// where T_j(K) = sum_{k>K} |binom(s_j,k)| y^k is bounded geometrically with
// ratio y * max(1, (|s_j|+K)/(K+1)), and 1/(1-y) bounds |Log(1-w)| / |w|
// on |w| <= y.
//
// Throws DomainError if ||x|| >= 1 or K would exceed kLimitLatticeCap.
// A requested stop aborts with std::runtime_error.
LimitResult limit_complex(std::span<const cplx> xs, std::span<const cplx> ss,
                          double tol, std::stop_token stop = {});

// lim_n E[Z_n^{s1}(x1) / Z_n^{s2}(x2)], evaluated as limit_complex on the
// stacked query (x1, x2; s1, -s2).
LimitResult ratio_limit(std::span<const cplx> x1s, std::span<const cplx> x2s,
                        std::span<const cplx> s1s, std::span<const cplx> s2s,
                        double tol = 1e-13);

// lim_n E[|Z_n(x)|^{s1} exp(i s2 arg Z_n(x))], evaluated as the limit of
// E[Z_n^{(s1+s2)/2}(x) Z_n^{(s1-s2)/2}(conj x)].
LimitResult mellin_fourier_limit(cplx x, double s1, double s2,
                                 double tol = 1e-13);

// lim E|Z_n(x)|^{2s} written as the diagonal factors times a squared
// modulus of the off-diagonal ones.
double abs_moment_limit(cplx x, int s);

}  // namespace permoments
