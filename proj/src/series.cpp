#include "permoments/series.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace permoments {

TruncatedSeries::TruncatedSeries(std::size_t order) : coeffs_(order + 1) {}

TruncatedSeries::TruncatedSeries(std::size_t order, std::vector<cplx> coeffs)
    : coeffs_(std::move(coeffs)) {
  coeffs_.resize(order + 1);
}

TruncatedSeries TruncatedSeries::constant(cplx c, std::size_t order) {
  TruncatedSeries s(order);
  s[0] = c;
  return s;
}

TruncatedSeries TruncatedSeries::geometric(std::size_t order) {
  return TruncatedSeries(order, std::vector<cplx>(order + 1, 1.0));
}

TruncatedSeries TruncatedSeries::truncated(std::size_t order) const {
  return TruncatedSeries(order, coeffs_);
}

TruncatedSeries series_mul(const TruncatedSeries& f, const TruncatedSeries& g) {
  const std::size_t order = std::min(f.order(), g.order());
  TruncatedSeries out(order);
  for (std::size_t i = 0; i <= order; ++i) {
    if (f[i] == cplx{}) continue;
    for (std::size_t j = 0; i + j <= order; ++j) out[i + j] += f[i] * g[j];
  }
  return out;
}

TruncatedSeries series_exp(const TruncatedSeries& f) {
  if (f[0] != cplx{})
    throw std::invalid_argument("series_exp needs a zero constant term");
  const std::size_t order = f.order();
  TruncatedSeries g(order);
  g[0] = 1.0;
  for (std::size_t n = 1; n <= order; ++n) {
    cplx acc = 0.0;
    for (std::size_t j = 1; j <= n; ++j)
      acc += static_cast<double>(j) * f[j] * g[n - j];
    g[n] = acc / static_cast<double>(n);
  }
  return g;
}

TruncatedSeries series_log(const TruncatedSeries& f) {
  if (f[0] == cplx{})
    throw std::invalid_argument("series_log needs a nonzero constant term");
  const std::size_t order = f.order();
  TruncatedSeries g(order);
  g[0] = std::log(f[0]);
  // f g' = f'  =>  n f_0 g_n = n f_n - sum_{j=1}^{n-1} j g_j f_{n-j}
  for (std::size_t n = 1; n <= order; ++n) {
    cplx acc = static_cast<double>(n) * f[n];
    for (std::size_t j = 1; j < n; ++j)
      acc -= static_cast<double>(j) * g[j] * f[n - j];
    g[n] = acc / (static_cast<double>(n) * f[0]);
  }
  return g;
}

cplx generalized_binomial(cplx s, int k) {
  if (k < 0) return 0.0;
  cplx b = 1.0;
  for (int m = 1; m <= k; ++m) b *= (s - static_cast<double>(m - 1)) / static_cast<double>(m);
  return b;
}

TruncatedSeries binomial_power_series(cplx a, cplx e, std::size_t order) {
  TruncatedSeries out(order);
  out[0] = 1.0;
  for (std::size_t k = 1; k <= order; ++k)
    out[k] = out[k - 1] * (e - static_cast<double>(k - 1)) /
             static_cast<double>(k) * (-a);
  return out;
}

namespace {

bool exactly_one(cplx a) { return a == cplx{1.0, 0.0}; }

std::optional<long long> integral(cplx e) {
  const double r = std::round(e.real());
  if (std::abs(e.imag()) > 1e-12 || std::abs(e.real() - r) > 1e-12)
    return std::nullopt;
  return static_cast<long long>(r);
}

}  // namespace

FactorList FactorList::collapsed(double merge_tol) const {
  FactorList out;
  for (const auto& f : factors) {
    auto it = std::find_if(out.factors.begin(), out.factors.end(),
                           [&](const Factor& g) {
                             return std::abs(g.a - f.a) <= merge_tol;
                           });
    if (it == out.factors.end()) {
      out.factors.push_back(f);
    } else {
      it->e += f.e;
      if (exactly_one(f.a)) it->a = f.a;
    }
  }
  std::erase_if(out.factors, [](const Factor& f) {
    auto k = integral(f.e);
    return k ? *k == 0 : std::abs(f.e) == 0.0;
  });
  return out;
}

TruncatedSeries FactorList::expand(std::size_t order) const {
  TruncatedSeries acc = TruncatedSeries::constant(1.0, order);
  for (const auto& f : factors)
    acc = series_mul(acc, binomial_power_series(f.a, f.e, order));
  return acc;
}

bool FactorList::has_integer_exponents() const {
  return std::all_of(factors.begin(), factors.end(),
                     [](const Factor& f) { return integral(f.e).has_value(); });
}

std::vector<cplx> poly_from_roots(std::span<const cplx> as) {
  std::vector<cplx> p{1.0};
  for (const auto& a : as) {
    p.push_back(0.0);
    for (std::size_t i = p.size() - 1; i > 0; --i) p[i] -= a * p[i - 1];
  }
  return p;
}

RationalFunction to_rational(const FactorList& factors) {
  std::vector<cplx> numer_roots;
  std::vector<cplx> denom_roots;
  for (const auto& f : factors.factors) {
    auto k = integral(f.e);
    if (!k) throw std::invalid_argument("to_rational needs integer exponents");
    auto& roots = *k > 0 ? numer_roots : denom_roots;
    for (long long i = 0; i < std::abs(*k); ++i) roots.push_back(f.a);
  }
  return {poly_from_roots(numer_roots), poly_from_roots(denom_roots)};
}

std::vector<cplx> rational_coefficients(std::span<const cplx> numer,
                                        std::span<const cplx> denom,
                                        std::size_t n) {
  if (denom.empty() || denom[0] == cplx{})
    throw std::invalid_argument("rational_coefficient needs d_0 != 0");
  std::vector<cplx> c(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    cplx acc = i < numer.size() ? numer[i] : cplx{};
    const std::size_t jmax = std::min(i, denom.size() - 1);
    for (std::size_t j = 1; j <= jmax; ++j) acc -= denom[j] * c[i - j];
    c[i] = acc / denom[0];
  }
  return c;
}

cplx rational_coefficient(std::span<const cplx> numer,
                          std::span<const cplx> denom, std::size_t n) {
  if (denom.empty() || denom[0] == cplx{})
    throw std::invalid_argument("rational_coefficient needs d_0 != 0");
  // Ring buffer of the last deg(D) coefficients; history[i % width] = c_i.
  const std::size_t width = std::max<std::size_t>(denom.size() - 1, 1);
  std::vector<cplx> history(width);
  cplx current = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    cplx acc = i < numer.size() ? numer[i] : cplx{};
    const std::size_t jmax = std::min(i, denom.size() - 1);
    for (std::size_t j = 1; j <= jmax; ++j)
      acc -= denom[j] * history[(i - j) % width];
    current = acc / denom[0];
    history[i % width] = current;
  }
  return current;
}

}  // namespace permoments

namespace permoments {

namespace {

// Quad-precision complex value for the cascade. A dominant pole of order r
// sums an oscillating sequence whose net contribution can be many orders of
// magnitude smaller than its terms; in double the rounding noise grows like
// eps n^{r'} relative to the answer (r' the order of the next resonant pole).
struct Quad {
  __float128 re = 0;
  __float128 im = 0;
};

inline Quad operator+(Quad l, Quad r) { return {l.re + r.re, l.im + r.im}; }
inline Quad operator-(Quad l, Quad r) { return {l.re - r.re, l.im - r.im}; }
inline Quad operator*(Quad l, Quad r) {
  return {l.re * r.re - l.im * r.im, l.re * r.im + l.im * r.re};
}

class FilterCascade {
 public:
  // Zeros first, then pole groups by ascending multiplicity, so the
  // dominant pole runs last.
  explicit FilterCascade(const FactorList& factors) {
    std::vector<std::pair<long long, cplx>> groups;
    for (const auto& f : factors.factors) {
      auto k = integral(f.e);
      if (!k) throw std::invalid_argument("factored coefficients need integer exponents");
      groups.emplace_back(*k, f.a);
    }
    std::stable_sort(groups.begin(), groups.end(),
                     [](const auto& l, const auto& r) { return -l.first < -r.first; });
    for (const auto& [k, a] : groups)
      for (long long i = 0; i < std::abs(k); ++i)
        stages_.push_back({Quad{a.real(), a.imag()}, k > 0, Quad{}});
  }

  cplx step(bool impulse) {
    Quad input;
    if (impulse) input.re = 1;
    for (auto& st : stages_) {
      Quad out;
      if (st.zero) {
        out = input - st.a * st.prev;
        st.prev = input;
      } else {
        out = input + st.a * st.prev;
        st.prev = out;
      }
      input = out;
    }
    return {static_cast<double>(input.re), static_cast<double>(input.im)};
  }

 private:
  struct Stage {
    Quad a;
    bool zero;   // (1 - a t) when true, 1 / (1 - a t) otherwise
    Quad prev;   // previous input (zero) or previous output (pole)
  };
  std::vector<Stage> stages_;
};

}  // namespace

cplx factored_coefficient(const FactorList& factors, std::size_t n) {
  FilterCascade cascade(factors);
  cplx current = cascade.step(true);
  for (std::size_t i = 1; i <= n; ++i) current = cascade.step(false);
  return current;
}

std::vector<cplx> factored_coefficients(const FactorList& factors,
                                        std::size_t n) {
  FilterCascade cascade(factors);
  std::vector<cplx> out(n + 1);
  for (std::size_t i = 0; i <= n; ++i) out[i] = cascade.step(i == 0);
  return out;
}

}  // namespace permoments
