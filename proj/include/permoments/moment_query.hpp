#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace permoments {

using cplx = std::complex<double>;

// Arguments of E[prod_k Z_n^{s_k}(x_k)].
//
// Exponents are stored as complex numbers. A query is an "integer query"
// when every exponent is a nonnegative integer (zero imaginary part,
// integral real part); those admit |x| <= 1. Every other query needs
// max_k |x_k| < 1 so that the principal-branch powers of (1 - x^m) exist.
struct MomentQuery {
  std::size_t n = 0;
  std::vector<cplx> xs;
  std::vector<cplx> ss;

  MomentQuery() = default;
  MomentQuery(std::size_t n, std::vector<cplx> xs, std::vector<cplx> ss);

  std::size_t arity() const { return xs.size(); }

  // max_k |x_k|
  double norm() const;

  // The exponents as integers if all are nonnegative integers.
  std::optional<std::vector<int>> integer_exponents() const;

  bool is_integer() const { return integer_exponents().has_value(); }

  // Throws std::invalid_argument unless xs and ss are nonempty and of equal
  // length.
  void validate() const;
};

double max_abs(std::span<const cplx> xs);

// Nonnegative integer value of s, if s is one (within 1e-12 in both parts).
std::optional<int> as_nonnegative_integer(cplx s);

// Principal-branch power w^s = exp(s Log w). w^0 = 1 for every w.
cplx principal_pow(cplx w, cplx s);

// w^e for integer e by repeated squaring; 0^0 = 1.
cplx int_pow(cplx w, long long e);

}  // namespace permoments
