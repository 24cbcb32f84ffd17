#pragma once

#include <ostream>
#include <vector>

#include "permoments/moment_query.hpp"

namespace permoments {

// Tolerance on ||x| - 1| for points that are meant to lie on the circle.
inline constexpr double kUnitCircleTol = 1e-12;
// Minimum |x^j - 1| for x to count as "not a root of unity" up to an order.
inline constexpr double kRootOfUnityEps = 1e-9;

// x / |x| if ||x| - 1| <= kUnitCircleTol; DomainError otherwise.
cplx on_unit_circle(cplx x);

// True iff |x^j - 1| > eps for all 1 <= j <= max_order. x must lie on the
// unit circle (DomainError otherwise).
bool check_not_root_of_unity(cplx x, int max_order,
                             double eps = kRootOfUnityEps);

// Exponent S(k) = (-1)^{k+1} binom(s1+s2, s2+k) of (1 - x^k t) after the
// factors of the (x, conj x) generating function are collected,
// -s2 <= k <= s1.
long long collapsed_exponent(int s1, int s2, int k);

// The dominant-pole indices predicted by the case analysis on s1 - s2 mod 4.
std::vector<int> case_table_k0(int s1, int s2);

// Largest binomial coefficient binom(s1+s2, s2+k) over even k in [-s2, s1],
// and the even k attaining it, in increasing order.
struct DominantPoles {
  long long order = 0;  // M
  std::vector<int> k0;
};
DominantPoles dominant_poles(int s1, int s2);

// Leading behaviour E[Z_n^{s1}(x) Z_n^{s2}(conj x)] ~ n^{M-1} sum C(k0) x^{k0 n}
// for x on the unit circle and not a root of unity.
struct AsymptoticPrediction {
  struct Term {
    int k0 = 0;
    cplx constant;
  };
  int s1 = 0;
  int s2 = 0;
  cplx x;
  long long order = 0;  // M; the growth exponent is M - 1
  std::vector<Term> terms;

  long long exponent() const { return order - 1; }
};

// C(s1, s2, k0, x) =
//   prod_{k != k0} (1 - x^k conj(x)^{k0})^{S(k)} / (binom(s1+s2, s2+k0) - 1)!
cplx leading_constant(int s1, int s2, int k0, cplx x);

// Throws DomainError when x is (numerically) a root of unity of order at
// most s1 + s2, or when (M - 1)! overflows a double. Also throws
// std::logic_error if the computed dominant indices disagree with
// case_table_k0.
AsymptoticPrediction leading_terms(int s1, int s2, cplx x);

// n^{M-1} sum_terms C(k0) x^{k0 n}
cplx predict_mixed_moment(const AsymptoticPrediction& p, long long n);

// n^{binom(2s,s)-1} prod_{k=1..s} |1 - x^k|^{2 (-1)^{k+1} binom(2s, s+k)}
//   / (binom(2s,s) - 1)!
double predict_abs_moment(int s, cplx x, long long n);

struct RealImagMeans {
  double real = 0.0;  // E[Re Z_n(x)] = 1 - cos(phi)
  double imag = 0.0;  // E[Im Z_n(x)] = -sin(phi)
};
RealImagMeans real_imag_expectations(cplx x);

// A real trigonometric polynomial sum_f c_f cos(f n phi) + d_f sin(f n phi)
// over frequencies f = 0, 2, 4, ...; cos_coeffs[i] and sin_coeffs[i] belong
// to frequency 2i.
struct TrigSeries {
  std::vector<double> cos_coeffs;
  std::vector<double> sin_coeffs;
  // Largest imaginary part discarded while forming the real coefficients.
  double imag_residue = 0.0;

  double evaluate(double angle) const;
  bool is_zero(double tol = 0.0) const;
};

// Leading growth E[R_n^s] ~ n^{M-1} real(n phi) and
// E[I_n^s] ~ n^{M-1} imag(n phi) with M = binom(s, floor(s/2)).
struct TrigPolynomialGrowth {
  int s = 0;
  cplx x;
  long long order = 0;  // M
  TrigSeries real_part;
  TrigSeries imag_part;

  long long exponent() const { return order - 1; }
  double predict_real(long long n) const;
  double predict_imag(long long n) const;
};

// Expands R_n^s and I_n^s into mixed moments Z^k conj(Z)^{s-k}, keeps the
// pairs with the largest growth order and folds their leading constants into
// cosine/sine coefficients.
TrigPolynomialGrowth real_imag_moment_growth(int s, cplx x);

// E[R_n^s] and E[I_n^s] computed exactly from the generating functions.
RealImagMeans exact_real_imag_moment(int s, cplx x, long long n);

struct RatioCheck {
  long long n = 0;
  cplx exact;
  cplx predicted;
  cplx ratio;  // exact / predicted
  // |predicted| < 1e-6 n^{M-1} sum |C(k0)|: a zero of a two-term prediction.
  bool prediction_vanishes = false;

  double abs_exact() const { return std::abs(exact); }
  double abs_predicted() const { return std::abs(predicted); }
  double deviation() const { return std::abs(ratio - 1.0); }
};

RatioCheck verify_ratio(int s1, int s2, cplx x, long long n);
RatioCheck verify_ratio(const AsymptoticPrediction& p, long long n);

// Writes the header n,exact_re,exact_im,pred_re,pred_im,ratio_abs.
void write_ratio_csv_header(std::ostream& out);
// ratio_abs is |exact / predicted|; empty when the prediction vanishes.
void write_ratio_csv_row(std::ostream& out, const RatioCheck& row);

}  // namespace permoments
