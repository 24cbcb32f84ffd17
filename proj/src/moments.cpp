#include "permoments/moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "permoments/errors.hpp"

namespace permoments {

namespace {

long long int_binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long b = 1;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

// Advances a multi-index inside the box [0, hi_j]; false after the last one.
bool next_index(std::vector<int>& k, std::span<const int> hi) {
  for (std::size_t j = k.size(); j-- > 0;) {
    if (k[j] < hi[j]) {
      ++k[j];
      return true;
    }
    k[j] = 0;
  }
  return false;
}

void require_integer_path(std::span<const cplx> xs, std::span<const int> ss) {
  if (xs.empty() || xs.size() != ss.size())
    throw std::invalid_argument("points and exponents must have equal, nonzero length");
  for (int s : ss)
    if (s < 0) throw std::invalid_argument("integer exponents must be nonnegative");
  if (max_abs(xs) > 1.0 + 1e-12)
    throw DomainError("the integer generating function needs ||x|| <= 1");
}

FactorList rational_ready_factors(std::span<const cplx> xs,
                                  std::span<const int> ss) {
  FactorList merged = integer_product_factors(xs, ss).collapsed(kFactorMergeTol);
  const auto& fs = merged.factors;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    for (std::size_t j = i + 1; j < fs.size(); ++j) {
      const double gap = std::abs(fs[i].a - fs[j].a);
      const bool on_circle = std::abs(fs[i].a) > 1.0 - kFactorCollisionTol &&
                             std::abs(fs[j].a) > 1.0 - kFactorCollisionTol;
      if (on_circle && gap < kFactorCollisionTol)
        throw DomainError(
            "x is numerically a root of unity: generating function factors "
            "collide (gap " + std::to_string(gap) + ")");
    }
  }
  return merged;
}

}  // namespace

FactorList integer_product_factors(std::span<const cplx> xs,
                                   std::span<const int> ss) {
  if (xs.size() != ss.size())
    throw std::invalid_argument("points and exponents must have equal length");
  FactorList out;
  std::vector<int> k(ss.size(), 0);
  do {
    cplx a = 1.0;
    long long e = -1;
    for (std::size_t j = 0; j < k.size(); ++j) {
      a *= int_pow(xs[j], k[j]);
      e *= int_binomial(ss[j], k[j]) * ((k[j] % 2) ? -1 : 1);
    }
    out.factors.push_back({a, static_cast<double>(e)});
  } while (next_index(k, ss));
  return out;
}

std::vector<cplx> gf_moments_integer(std::span<const cplx> xs,
                                     std::span<const int> ss, std::size_t n) {
  require_integer_path(xs, ss);
  return factored_coefficients(rational_ready_factors(xs, ss), n);
}

cplx gf_moment_integer(const MomentQuery& q) {
  q.validate();
  const auto ints = q.integer_exponents();
  if (!ints)
    throw std::invalid_argument("gf_moment_integer needs nonnegative integer exponents");
  require_integer_path(q.xs, *ints);
  if (q.n == 0) return 1.0;
  return factored_coefficient(rational_ready_factors(q.xs, *ints), q.n);
}

cplx gf_moment_complex(const MomentQuery& q) {
  q.validate();
  if (q.norm() >= 1.0)
    throw DomainError("complex exponents need ||x|| < 1");
  if (q.n == 0) return 1.0;
  TruncatedSeries inner(q.n);
  std::vector<cplx> powers(q.arity(), 1.0);
  for (std::size_t m = 1; m <= q.n; ++m) {
    cplx a = 1.0;
    for (std::size_t j = 0; j < q.arity(); ++j) {
      powers[j] *= q.xs[j];
      a *= principal_pow(1.0 - powers[j], q.ss[j]);
    }
    inner[m] = a / static_cast<double>(m);
  }
  return series_exp(inner)[q.n];
}

cplx limit_integer(std::span<const cplx> xs, std::span<const int> ss) {
  require_integer_path(xs, ss);
  if (max_abs(xs) >= 1.0) throw DomainError("limits need ||x|| < 1");
  const auto fl = integer_product_factors(xs, ss);
  cplx value = 1.0;
  // factors[0] is k = 0, the (1 - t)^{-1} pole
  for (std::size_t i = 1; i < fl.factors.size(); ++i) {
    const auto& f = fl.factors[i];
    value *= int_pow(1.0 - f.a, static_cast<long long>(std::round(f.e.real())));
  }
  return value;
}

LimitResult limit_complex(std::span<const cplx> xs, std::span<const cplx> ss,
                          double tol, std::stop_token stop) {
  if (xs.empty() || xs.size() != ss.size())
    throw std::invalid_argument("points and exponents must have equal, nonzero length");
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const double y = max_abs(xs);
  if (y >= 1.0) throw DomainError("limits need ||x|| < 1");
  const std::size_t p = xs.size();
  const double log_const = 1.0 / (1.0 - y);

  // Per-coordinate tables, index k = 0..K.
  std::vector<std::vector<cplx>> signed_binom(p), power(p);
  std::vector<std::vector<double>> abs_binom(p);
  for (std::size_t j = 0; j < p; ++j) {
    signed_binom[j] = {1.0};
    power[j] = {1.0};
    abs_binom[j] = {1.0};
  }

  cplx log_sum = 0.0;
  std::vector<int> k(p);
  for (int radius = 1;; ++radius) {
    if (stop.stop_requested()) throw OperationCancelled();
    if (radius > kLimitLatticeCap)
      throw DomainError("limit_complex: tolerance " + std::to_string(tol) +
                        " not reached within lattice radius " +
                        std::to_string(kLimitLatticeCap));
    for (std::size_t j = 0; j < p; ++j) {
      const cplx ratio = (ss[j] - static_cast<double>(radius - 1)) /
                         static_cast<double>(radius);
      signed_binom[j].push_back(-signed_binom[j].back() * ratio);
      abs_binom[j].push_back(std::abs(signed_binom[j].back()));
      power[j].push_back(power[j].back() * xs[j]);
    }

    // Shell: max_j k_j == radius. The first coordinate equal to radius is
    // `lead`; earlier coordinates are < radius, later ones <= radius.
    cplx shell = 0.0;
    std::vector<int> hi(p);
    for (std::size_t lead = 0; lead < p; ++lead) {
      for (std::size_t j = 0; j < p; ++j) hi[j] = j < lead ? radius - 1 : radius;
      hi[lead] = 0;  // odometer skips the lead coordinate
      std::fill(k.begin(), k.end(), 0);
      do {
        cplx coef = -1.0;
        cplx w = 1.0;
        for (std::size_t j = 0; j < p; ++j) {
          const int kj = j == lead ? radius : k[j];
          coef *= signed_binom[j][kj];
          w *= power[j][kj];
        }
        if (coef != cplx{}) shell += coef * std::log(1.0 - w);
      } while (next_index(k, hi));
    }
    log_sum += shell;

    double tail = 0.0;
    {
      std::vector<double> head(p), rest(p);
      for (std::size_t j = 0; j < p; ++j) {
        double h = 0.0, yk = 1.0;
        for (int i = 0; i <= radius; ++i, yk *= y) h += abs_binom[j][i] * yk;
        head[j] = h;
        const double last = abs_binom[j][radius] * std::pow(y, radius);
        if (last == 0.0) {
          rest[j] = 0.0;
        } else {
          const double rho = y * std::max(1.0, (std::abs(ss[j]) + radius) /
                                                   (radius + 1.0));
          rest[j] = rho < 1.0 ? last * rho / (1.0 - rho)
                              : std::numeric_limits<double>::infinity();
        }
      }
      for (std::size_t j = 0; j < p; ++j) {
        double term = rest[j];
        for (std::size_t i = 0; i < p; ++i)
          if (i != j) term *= head[i] + rest[i];
        tail += term;
      }
      tail *= log_const;
    }

    if (tail < tol / 2 && std::abs(shell) < tol / 2)
      return {std::exp(log_sum), tail, radius};
  }
}

LimitResult ratio_limit(std::span<const cplx> x1s, std::span<const cplx> x2s,
                        std::span<const cplx> s1s, std::span<const cplx> s2s,
                        double tol) {
  if (x1s.size() != s1s.size() || x2s.size() != s2s.size())
    throw std::invalid_argument("ratio_limit: arity mismatch");
  if (max_abs(x1s) >= 1.0 || max_abs(x2s) >= 1.0)
    throw DomainError("limits need ||x|| < 1");
  std::vector<cplx> xs(x1s.begin(), x1s.end());
  xs.insert(xs.end(), x2s.begin(), x2s.end());
  std::vector<cplx> ss(s1s.begin(), s1s.end());
  for (const auto& s : s2s) ss.push_back(-s);
  return limit_complex(xs, ss, tol);
}

LimitResult mellin_fourier_limit(cplx x, double s1, double s2, double tol) {
  const std::vector<cplx> xs{x, std::conj(x)};
  const std::vector<cplx> ss{(s1 + s2) / 2.0, (s1 - s2) / 2.0};
  return limit_complex(xs, ss, tol);
}

double abs_moment_limit(cplx x, int s) {
  if (s < 0) throw std::invalid_argument("abs_moment_limit needs s >= 0");
  if (std::abs(x) >= 1.0) throw DomainError("limits need |x| < 1");
  const double r2 = std::norm(x);
  double diagonal = 1.0;
  for (int k = 1; k <= s; ++k) {
    const long long b = int_binomial(s, k);
    diagonal *= std::pow(1.0 - std::pow(r2, k), -static_cast<double>(b * b));
  }
  cplx cross = 1.0;
  for (int k1 = 0; k1 <= s; ++k1) {
    for (int k2 = k1 + 1; k2 <= s; ++k2) {
      const long long e = int_binomial(s, k1) * int_binomial(s, k2) *
                          (((k1 + k2 + 1) % 2) ? -1 : 1);
      cross *= int_pow(1.0 - int_pow(x, k1) * int_pow(std::conj(x), k2), e);
    }
  }
  return diagonal * std::norm(cross);
}

}  // namespace permoments
