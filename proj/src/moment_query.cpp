#include "permoments/moment_query.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace permoments {

MomentQuery::MomentQuery(std::size_t n, std::vector<cplx> xs,
                         std::vector<cplx> ss)
    : n(n), xs(std::move(xs)), ss(std::move(ss)) {
  validate();
}

double max_abs(std::span<const cplx> xs) {
  double m = 0.0;
  for (const auto& x : xs) m = std::max(m, std::abs(x));
  return m;
}

double MomentQuery::norm() const { return max_abs(xs); }

std::optional<int> as_nonnegative_integer(cplx s) {
  const double r = std::round(s.real());
  if (std::abs(s.imag()) > 1e-12 || std::abs(s.real() - r) > 1e-12 || r < 0.0)
    return std::nullopt;
  return static_cast<int>(r);
}

std::optional<std::vector<int>> MomentQuery::integer_exponents() const {
  std::vector<int> out;
  out.reserve(ss.size());
  for (const auto& s : ss) {
    auto k = as_nonnegative_integer(s);
    if (!k) return std::nullopt;
    out.push_back(*k);
  }
  return out;
}

void MomentQuery::validate() const {
  if (xs.empty())
    throw std::invalid_argument("moment query needs at least one variable");
  if (xs.size() != ss.size())
    throw std::invalid_argument("moment query: " + std::to_string(xs.size()) +
                                " points but " + std::to_string(ss.size()) +
                                " exponents");
}

cplx principal_pow(cplx w, cplx s) {
  if (s == cplx{0.0, 0.0}) return 1.0;
  if (w == cplx{0.0, 0.0}) return 0.0;
  return std::exp(s * std::log(w));
}

cplx int_pow(cplx w, long long e) {
  if (e < 0) return 1.0 / int_pow(w, -e);
  cplx result = 1.0;
  while (e > 0) {
    if (e & 1) result *= w;
    w *= w;
    e >>= 1;
  }
  return result;
}

}  // namespace permoments
