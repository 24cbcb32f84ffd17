#include "permoments/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <stdexcept>
#include <string>

#include "permoments/errors.hpp"
#include "permoments/moments.hpp"

namespace permoments {

namespace {

long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  long long b = 1;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

// (M - 1)! as a double; DomainError past the double range.
double factorial_of(long long m) {
  if (m > 170) throw DomainError("factorial " + std::to_string(m) + "! overflows a double");
  double f = 1.0;
  for (long long i = 2; i <= m; ++i) f *= static_cast<double>(i);
  return f;
}

void require_exponents(int s1, int s2) {
  if (s1 < 0 || s2 < 0) throw std::invalid_argument("exponents must be nonnegative");
  if (s1 + s2 < 1) throw std::invalid_argument("need s1 + s2 >= 1");
}

cplx unit(double angle) { return std::polar(1.0, angle); }

}  // namespace

cplx on_unit_circle(cplx x) {
  const double r = std::abs(x);
  if (std::abs(r - 1.0) > kUnitCircleTol)
    throw DomainError("x must lie on the unit circle (|x| = " + std::to_string(r) + ")");
  return x / r;
}

bool check_not_root_of_unity(cplx x, int max_order, double eps) {
  const double phi = std::arg(on_unit_circle(x));
  for (int j = 1; j <= max_order; ++j)
    if (std::abs(unit(j * phi) - 1.0) <= eps) return false;
  return true;
}

long long collapsed_exponent(int s1, int s2, int k) {
  if (s1 < 0 || s2 < 0) throw std::invalid_argument("exponents must be nonnegative");
  if (k < -s2 || k > s1)
    throw std::invalid_argument("collapsed_exponent: k outside [-s2, s1]");
  const long long b = binomial(s1 + s2, s2 + k);
  return ((k + 1) % 2 == 0) ? b : -b;
}

std::vector<int> case_table_k0(int s1, int s2) {
  const int d = s1 - s2;
  switch (((d % 4) + 4) % 4) {
    case 0: return {d / 2};
    case 1: return {(d - 1) / 2};
    case 3: return {(d + 1) / 2};
    default: return {d / 2 - 1, d / 2 + 1};
  }
}

DominantPoles dominant_poles(int s1, int s2) {
  if (s1 < 0 || s2 < 0) throw std::invalid_argument("exponents must be nonnegative");
  DominantPoles out;
  for (int k = -s2; k <= s1; ++k) {
    if (k % 2 != 0) continue;
    const long long b = binomial(s1 + s2, s2 + k);
    if (b > out.order) {
      out.order = b;
      out.k0 = {k};
    } else if (b == out.order) {
      out.k0.push_back(k);
    }
  }
  return out;
}

cplx leading_constant(int s1, int s2, int k0, cplx x) {
  require_exponents(s1, s2);
  if (k0 % 2 != 0 || k0 < -s2 || k0 > s1)
    throw std::invalid_argument("k0 must be even and in [-s2, s1]");
  const double phi = std::arg(on_unit_circle(x));
  cplx product = 1.0;
  for (int k = -s2; k <= s1; ++k) {
    if (k == k0) continue;
    product *= int_pow(1.0 - unit((k - k0) * phi), collapsed_exponent(s1, s2, k));
  }
  return product / factorial_of(binomial(s1 + s2, s2 + k0) - 1);
}

AsymptoticPrediction leading_terms(int s1, int s2, cplx x) {
  require_exponents(s1, s2);
  x = on_unit_circle(x);
  if (!check_not_root_of_unity(x, s1 + s2))
    throw DomainError("x is a root of unity of order <= " + std::to_string(s1 + s2));
  const auto poles = dominant_poles(s1, s2);
  if (poles.k0 != case_table_k0(s1, s2))
    throw std::logic_error("dominant poles disagree with the mod-4 case table for (" +
                           std::to_string(s1) + ", " + std::to_string(s2) + ")");
  AsymptoticPrediction p;
  p.s1 = s1;
  p.s2 = s2;
  p.x = x;
  p.order = poles.order;
  for (int k0 : poles.k0) p.terms.push_back({k0, leading_constant(s1, s2, k0, x)});
  return p;
}

cplx predict_mixed_moment(const AsymptoticPrediction& p, long long n) {
  if (n < 1) throw std::invalid_argument("predictions need n >= 1");
  const double phi = std::arg(p.x);
  cplx sum = 0.0;
  for (const auto& t : p.terms)
    sum += t.constant * unit(static_cast<double>(t.k0) * static_cast<double>(n) * phi);
  return std::pow(static_cast<double>(n), static_cast<double>(p.exponent())) * sum;
}

double predict_abs_moment(int s, cplx x, long long n) {
  if (s < 1) throw std::invalid_argument("predict_abs_moment needs s >= 1");
  if (n < 1) throw std::invalid_argument("predictions need n >= 1");
  x = on_unit_circle(x);
  if (!check_not_root_of_unity(x, 2 * s))
    throw DomainError("x is a root of unity of order <= " + std::to_string(2 * s));
  const double phi = std::arg(x);
  const long long order = binomial(2 * s, s);
  double product = 1.0;
  for (int k = 1; k <= s; ++k) {
    const double e = 2.0 * static_cast<double>(binomial(2 * s, s + k)) * ((k % 2) ? 1.0 : -1.0);
    product *= std::pow(std::abs(1.0 - unit(k * phi)), e);
  }
  return std::pow(static_cast<double>(n), static_cast<double>(order - 1)) * product /
         factorial_of(order - 1);
}

RealImagMeans real_imag_expectations(cplx x) {
  const double phi = std::arg(on_unit_circle(x));
  return {1.0 - std::cos(phi), -std::sin(phi)};
}

double TrigSeries::evaluate(double angle) const {
  double v = 0.0;
  for (std::size_t i = 0; i < cos_coeffs.size(); ++i)
    v += cos_coeffs[i] * std::cos(2.0 * i * angle) + sin_coeffs[i] * std::sin(2.0 * i * angle);
  return v;
}

bool TrigSeries::is_zero(double tol) const {
  auto small = [tol](double c) { return std::abs(c) <= tol; };
  return std::all_of(cos_coeffs.begin(), cos_coeffs.end(), small) &&
         std::all_of(sin_coeffs.begin(), sin_coeffs.end(), small);
}

double TrigPolynomialGrowth::predict_real(long long n) const {
  const double phi = std::arg(x);
  return std::pow(static_cast<double>(n), static_cast<double>(exponent())) *
         real_part.evaluate(static_cast<double>(n) * phi);
}

double TrigPolynomialGrowth::predict_imag(long long n) const {
  const double phi = std::arg(x);
  return std::pow(static_cast<double>(n), static_cast<double>(exponent())) *
         imag_part.evaluate(static_cast<double>(n) * phi);
}

namespace {

// Folds sum_{k0} c_{k0} e^{i k0 theta} into real cos/sin coefficients.
TrigSeries fold(const std::map<int, cplx>& coeffs) {
  int top = 0;
  for (const auto& [k0, c] : coeffs) top = std::max(top, std::abs(k0));
  TrigSeries out;
  out.cos_coeffs.assign(top / 2 + 1, 0.0);
  out.sin_coeffs.assign(top / 2 + 1, 0.0);
  auto at = [&](int k0) {
    auto it = coeffs.find(k0);
    return it == coeffs.end() ? cplx{} : it->second;
  };
  for (int f = 0; f <= top; f += 2) {
    cplx a, b;
    if (f == 0) {
      a = at(0);
    } else {
      a = at(f) + at(-f);
      b = cplx{0.0, 1.0} * (at(f) - at(-f));
    }
    out.cos_coeffs[f / 2] = a.real();
    out.sin_coeffs[f / 2] = b.real();
    out.imag_residue = std::max({out.imag_residue, std::abs(a.imag()), std::abs(b.imag())});
  }
  return out;
}

}  // namespace

TrigPolynomialGrowth real_imag_moment_growth(int s, cplx x) {
  if (s < 1) throw std::invalid_argument("real_imag_moment_growth needs s >= 1");
  x = on_unit_circle(x);
  if (!check_not_root_of_unity(x, s))
    throw DomainError("x is a root of unity of order <= " + std::to_string(s));

  long long top = 0;
  for (int k = 0; k <= s; ++k) top = std::max(top, dominant_poles(k, s - k).order);

  const cplx real_scale = std::pow(2.0, -s);
  const cplx imag_scale = std::pow(cplx{0.0, 2.0}, -s);
  std::map<int, cplx> real_coeffs, imag_coeffs;
  for (int k = 0; k <= s; ++k) {
    if (dominant_poles(k, s - k).order != top) continue;
    const auto pred = leading_terms(k, s - k, x);
    const double weight = static_cast<double>(binomial(s, k));
    const double sign = ((s + k) % 2) ? -1.0 : 1.0;
    for (const auto& t : pred.terms) {
      real_coeffs[t.k0] += real_scale * weight * t.constant;
      imag_coeffs[t.k0] += imag_scale * sign * weight * t.constant;
    }
  }
  TrigPolynomialGrowth g;
  g.s = s;
  g.x = x;
  g.order = top;
  g.real_part = fold(real_coeffs);
  g.imag_part = fold(imag_coeffs);
  return g;
}

RealImagMeans exact_real_imag_moment(int s, cplx x, long long n) {
  if (s < 0) throw std::invalid_argument("exponent must be nonnegative");
  x = on_unit_circle(x);
  cplx real_sum = 0.0, imag_sum = 0.0;
  for (int k = 0; k <= s; ++k) {
    const cplx m = gf_moment_integer(MomentQuery(static_cast<std::size_t>(n),
                                                 {x, std::conj(x)},
                                                 {static_cast<double>(k),
                                                  static_cast<double>(s - k)}));
    const double weight = static_cast<double>(binomial(s, k));
    real_sum += weight * m;
    imag_sum += (((s + k) % 2) ? -1.0 : 1.0) * weight * m;
  }
  real_sum *= std::pow(2.0, -s);
  imag_sum *= std::pow(cplx{0.0, 2.0}, -s);
  return {real_sum.real(), imag_sum.real()};
}

RatioCheck verify_ratio(const AsymptoticPrediction& p, long long n) {
  RatioCheck r;
  r.n = n;
  r.exact = gf_moment_integer(MomentQuery(static_cast<std::size_t>(n),
                                          {p.x, std::conj(p.x)},
                                          {static_cast<double>(p.s1),
                                           static_cast<double>(p.s2)}));
  r.predicted = predict_mixed_moment(p, n);
  double magnitude = 0.0;
  for (const auto& t : p.terms) magnitude += std::abs(t.constant);
  const double scale =
      magnitude * std::pow(static_cast<double>(n), static_cast<double>(p.exponent()));
  r.prediction_vanishes = std::abs(r.predicted) < 1e-6 * scale;
  r.ratio = r.prediction_vanishes ? cplx{} : r.exact / r.predicted;
  return r;
}

RatioCheck verify_ratio(int s1, int s2, cplx x, long long n) {
  return verify_ratio(leading_terms(s1, s2, x), n);
}

void write_ratio_csv_header(std::ostream& out) {
  out << "n,exact_re,exact_im,pred_re,pred_im,ratio_abs\n";
}

void write_ratio_csv_row(std::ostream& out, const RatioCheck& row) {
  const auto old = out.precision(17);
  out << row.n << ',' << row.exact.real() << ',' << row.exact.imag() << ','
      << row.predicted.real() << ',' << row.predicted.imag() << ',';
  if (!row.prediction_vanishes) out << std::abs(row.ratio);
  out << '\n';
  out.precision(old);
}

}  // namespace permoments
