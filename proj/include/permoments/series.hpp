#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "permoments/moment_query.hpp"

namespace permoments {

// A formal power series truncated modulo t^{N+1}: coefficients c_0..c_N.
class TruncatedSeries {
 public:
  explicit TruncatedSeries(std::size_t order = 0);
  TruncatedSeries(std::size_t order, std::vector<cplx> coeffs);

  static TruncatedSeries constant(cplx c, std::size_t order);
  static TruncatedSeries geometric(std::size_t order);

  std::size_t order() const { return coeffs_.size() - 1; }
  const std::vector<cplx>& coeffs() const { return coeffs_; }

  cplx operator[](std::size_t i) const { return coeffs_[i]; }
  cplx& operator[](std::size_t i) { return coeffs_[i]; }

  // Drops terms above `order`; raising the order pads with zeros.
  TruncatedSeries truncated(std::size_t order) const;

 private:
  std::vector<cplx> coeffs_;
};

// Cauchy product, truncated at the smaller order.
TruncatedSeries series_mul(const TruncatedSeries& f, const TruncatedSeries& g);

// exp(f) for f with c_0 = 0 (std::invalid_argument otherwise):
// g_0 = 1, n g_n = sum_{j=1..n} j f_j g_{n-j}.
TruncatedSeries series_exp(const TruncatedSeries& f);

// log(f) for f with c_0 != 0; the constant term is the principal Log(c_0).
TruncatedSeries series_log(const TruncatedSeries& f);

// Generalized binomial coefficient binom(s, k) as the running product
// prod_{m=1..k} (s - m + 1) / m.
cplx generalized_binomial(cplx s, int k);

// Coefficients of (1 - a t)^e up to t^N: c_k = binom(e, k) (-a)^k.
TruncatedSeries binomial_power_series(cplx a, cplx e, std::size_t order);

// A product of factors (1 - a t)^e.
struct FactorList {
  struct Factor {
    cplx a;
    cplx e;
  };
  std::vector<Factor> factors;

  // Merges factors whose a differ by at most `merge_tol`, summing their
  // exponents and dropping factors whose exponent becomes zero. When one of
  // the merged values is exactly representable (the constant 1), that value
  // is kept.
  FactorList collapsed(double merge_tol) const;

  // Dense expansion to order N.
  TruncatedSeries expand(std::size_t order) const;

  bool has_integer_exponents() const;
};

// Numerator and denominator polynomials (ascending coefficients) of a
// FactorList with integer exponents: positive exponents go to the
// numerator, negative ones to the denominator.
struct RationalFunction {
  std::vector<cplx> numer;
  std::vector<cplx> denom;
};

// Throws std::invalid_argument for non-integer exponents.
RationalFunction to_rational(const FactorList& factors);

// Multiplies out prod (1 - a_i t).
std::vector<cplx> poly_from_roots(std::span<const cplx> as);

// [N(t)/D(t)]_n by the recurrence d_0 c_n = N_n - sum_{j>=1} d_j c_{n-j};
// O(n deg D) time and O(deg D) memory. Throws std::invalid_argument if
// d_0 = 0.
cplx rational_coefficient(std::span<const cplx> numer,
                          std::span<const cplx> denom, std::size_t n);

// [prod (1 - a t)^e]_n for integer exponents, streaming the unit impulse
// through one first-order stage per unit of exponent: (1 - a t) maps
// u_i -> u_i - a u_{i-1}, 1/(1 - a t) maps u_i -> u_i + a v_{i-1}.
// O(n sum|e|) time and O(sum|e|) memory. Unlike the expanded
// numerator/denominator recurrence, repeated roots on |t| = 1 stay exact.
// The stages run in binary128, so dominant high-order poles do not amplify
// double rounding noise.
cplx factored_coefficient(const FactorList& factors, std::size_t n);

// All coefficients [.]_0 .. [.]_n of the same cascade.
std::vector<cplx> factored_coefficients(const FactorList& factors,
                                        std::size_t n);

// All coefficients [N/D]_0 .. [N/D]_n.
std::vector<cplx> rational_coefficients(std::span<const cplx> numer,
                                        std::span<const cplx> denom,
                                        std::size_t n);

}  // namespace permoments
