#include <doctest.h>

#include <cmath>
#include <numbers>

#include "permoments/errors.hpp"
#include "permoments/moments.hpp"
#include "permoments/partitions.hpp"
#include "permoments/rng.hpp"

using namespace permoments;

namespace {

long long choose(int n, int k) {
  long long c = 1;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

// [t^n] prod_{k=0..s} (1 - x^k t)^{-binom(s,k)(-1)^k}, one point, by dense
// multiplication of the binomial series of each factor.
cplx direct_product_coefficient(cplx x, int s, std::size_t n) {
  std::vector<cplx> f(n + 1);
  f[0] = 1.0;
  for (int k = 0; k <= s; ++k) {
    const double e = -double(choose(s, k)) * ((k % 2) ? -1.0 : 1.0);
    const cplx a = std::pow(x, k);
    std::vector<cplx> g(n + 1);
    g[0] = 1.0;
    for (std::size_t j = 1; j <= n; ++j) g[j] = g[j - 1] * (e - double(j) + 1.0) / double(j) * -a;
    std::vector<cplx> h(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
      for (std::size_t j = 0; i + j <= n; ++j) h[i + j] += f[i] * g[j];
    f = std::move(h);
  }
  return f[n];
}

cplx random_point(Rng& rng, double radius) {
  return std::polar(radius * std::sqrt(rng.uniform()), 2.0 * std::numbers::pi * rng.uniform());
}

bool close(cplx a, cplx b, double tol) {
  return std::abs(a - b) <= tol * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

}  // namespace

TEST_CASE("factor list of the integer generating function") {
  const std::vector<cplx> xs{cplx{0.5, 0.1}};
  const std::vector<int> ss{3};
  const auto fl = integer_product_factors(xs, ss);
  REQUIRE(fl.factors.size() == 4);
  CHECK(fl.factors[0].a == cplx{1.0});
  CHECK(fl.factors[0].e == cplx{-1.0});
  CHECK(fl.factors[1].e == cplx{3.0});
  CHECK(fl.factors[2].e == cplx{-3.0});
  CHECK(fl.factors[3].e == cplx{1.0});
}

TEST_CASE("generating function against the direct product") {
  Rng rng(11);
  for (int s = 0; s <= 4; ++s)
    for (int trial = 0; trial < 3; ++trial) {
      const cplx x = random_point(rng, 1.0);
      for (std::size_t n : {0u, 1u, 5u, 17u, 40u})
        CHECK(close(gf_moment_integer(MomentQuery(n, {x}, {double(s)})),
                    direct_product_coefficient(x, s, n), 1e-10));
    }
}

TEST_CASE("generating function against the partition sum") {
  Rng rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    const cplx x1 = random_point(rng, 0.95), x2 = random_point(rng, 0.95);
    const std::vector<cplx> ss{double(trial % 3 + 1), double(trial % 2)};
    for (std::size_t n : {0u, 3u, 12u, 25u}) {
      const MomentQuery q(n, {x1, x2}, ss);
      CHECK(close(gf_moment_integer(q), exact_moment_partition_sum(q), 1e-10));
    }
  }
}

TEST_CASE("coefficient range matches single extraction") {
  const std::vector<cplx> xs{cplx{0.2, 0.7}, cplx{-0.4, 0.1}};
  const std::vector<int> ss{2, 1};
  const auto all = gf_moments_integer(xs, ss, 100);
  REQUIRE(all.size() == 101);
  for (std::size_t n : {0u, 1u, 50u, 100u})
    CHECK(std::abs(all[n] - gf_moment_integer(MomentQuery(n, xs, {2.0, 1.0}))) < 1e-14);
}

TEST_CASE("cycle index series for complex exponents") {
  Rng rng(13);
  for (cplx s : {cplx{0.5, 0.0}, cplx{1.0, 1.0}, cplx{-0.7, 0.2}, cplx{2.0, 0.0}})
    for (int trial = 0; trial < 3; ++trial) {
      const cplx x = random_point(rng, 0.7);
      for (std::size_t n : {0u, 4u, 19u}) {
        const MomentQuery q(n, {x}, {s});
        CHECK(close(gf_moment_complex(q), exact_moment_partition_sum(q), 1e-10));
      }
    }
  CHECK(gf_moment_complex(MomentQuery(0, {0.3}, {cplx{0.5, 0.5}})) == cplx{1.0});
  CHECK_THROWS_AS(gf_moment_complex(MomentQuery(3, {1.0}, {cplx{0.5, 0.0}})), DomainError);
}

TEST_CASE("first moment and the n = 0 convention") {
  for (cplx x : {cplx{0.3, 0.0}, cplx{-0.2, 0.9}, std::polar(1.0, 2.2)}) {
    CHECK(gf_moment_integer(MomentQuery(0, {x}, {2.0})) == cplx{1.0});
    for (std::size_t n : {1u, 10u, 1000u})
      CHECK(std::abs(gf_moment_integer(MomentQuery(n, {x}, {1.0})) - (1.0 - x)) < 1e-12);
  }
}

TEST_CASE("integer limits") {
  Rng rng(14);
  for (int trial = 0; trial < 5; ++trial) {
    const cplx x = random_point(rng, 0.6);
    for (int s = 1; s <= 3; ++s) {
      const std::vector<cplx> xs{x};
      const std::vector<int> ss{s};
      const cplx limit = limit_integer(xs, ss);
      CHECK(close(gf_moment_integer(MomentQuery(200, xs, {double(s)})), limit, 1e-12));
      // direct: (1 - x)^s for s = 1, (1-x)^2/(1-x^2) for s = 2
      if (s == 1) CHECK(std::abs(limit - (1.0 - x)) < 1e-15);
      if (s == 2) CHECK(std::abs(limit - (1.0 - x) * (1.0 - x) / (1.0 - x * x)) < 1e-14);
    }
  }
  const std::vector<cplx> on_circle{std::polar(1.0, 1.0)};
  CHECK_THROWS_AS(limit_integer(on_circle, std::vector<int>{1}), DomainError);
}

TEST_CASE("lattice limit agrees with the product and bounds its error") {
  Rng rng(15);
  for (int trial = 0; trial < 6; ++trial) {
    const std::vector<cplx> xs{random_point(rng, 0.8), random_point(rng, 0.5)};
    const std::vector<int> ints{2, 1};
    const std::vector<cplx> ss{2.0, 1.0};
    const auto r = limit_complex(xs, ss, 1e-12);
    const cplx product = limit_integer(xs, ints);
    CHECK(std::abs(r.value / product - 1.0) <= r.tail_bound * 1.01 + 1e-13);
    CHECK(r.tail_bound < 1e-12);
  }
  const std::vector<cplx> x{cplx{0.4, 0.2}}, s{cplx{0.3, -0.6}};
  const auto r = limit_complex(x, s, 1e-13);
  CHECK(close(gf_moment_complex(MomentQuery(200, x, s)), r.value, 1e-12));
  CHECK(limit_complex(x, std::vector<cplx>{0.0}, 1e-10).value == cplx{1.0});
  CHECK_THROWS_AS(limit_complex(std::vector<cplx>{0.999999}, std::vector<cplx>{cplx{0.5, 0.0}}, 1e-15),
                  DomainError);
  CHECK_THROWS_AS(limit_complex(x, s, 0.0), std::invalid_argument);
  std::stop_source stop;
  stop.request_stop();
  CHECK_THROWS(limit_complex(x, s, 1e-13, stop.get_token()));
}

TEST_CASE("ratio and Mellin-Fourier limits reduce") {
  const std::vector<cplx> x1{cplx{0.3, 0.3}}, x2{cplx{-0.2, 0.4}};
  const std::vector<cplx> s1{cplx{0.8, 0.1}}, s2{cplx{0.5, 0.0}}, zero{0.0};
  CHECK(std::abs(ratio_limit(x1, x2, s1, zero).value - limit_complex(x1, s1, 1e-14).value) < 1e-12);
  CHECK(std::abs(ratio_limit(x1, x1, s1, s1).value - 1.0) < 1e-12);
  const std::vector<cplx> stacked{x1[0], x2[0]}, exps{s1[0], -s2[0]};
  CHECK(std::abs(ratio_limit(x1, x2, s1, s2).value - limit_complex(stacked, exps, 1e-14).value) < 1e-12);
  const cplx x{0.35, -0.4};
  for (int s = 1; s <= 3; ++s)
    CHECK(std::abs(mellin_fourier_limit(x, 2.0 * s, 0.0).value - abs_moment_limit(x, s)) < 1e-11);
  CHECK(std::abs(mellin_fourier_limit(x, 1.5, 1.5).value -
                 limit_complex(std::vector<cplx>{x}, std::vector<cplx>{1.5}, 1e-14).value) < 1e-12);
  // s1 = s2 = 1 reduces to E[Z] = 1 - x
  CHECK(std::abs(mellin_fourier_limit(x, 1.0, 1.0).value - (1.0 - x)) < 1e-12);
}

TEST_CASE("absolute moment limit matches the (x, conj x) product") {
  Rng rng(16);
  for (int trial = 0; trial < 5; ++trial) {
    const cplx x = random_point(rng, 0.9);
    const std::vector<cplx> pair{x, std::conj(x)};
    for (int s = 0; s <= 3; ++s) {
      const double v = abs_moment_limit(x, s);
      CHECK(std::abs(limit_integer(pair, std::vector<int>{s, s}) - v) <= 1e-10 * std::abs(v));
    }
  }
}

TEST_CASE("close distinct factors on the circle are refused") {
  // x^4 lands 4e-10 away from 1: neither merged nor separable
  const cplx x = std::polar(1.0, std::numbers::pi / 2 + 1e-10);
  CHECK_THROWS_AS(gf_moment_integer(MomentQuery(10, {x}, {4.0})), DomainError);
  // an exact collision merges and is fine
  CHECK_NOTHROW(gf_moment_integer(MomentQuery(10, {cplx{0.0, 1.0}}, {4.0})));
}

TEST_CASE("moment query validation") {
  CHECK_THROWS_AS(gf_moment_integer(MomentQuery(3, {0.5}, {cplx{0.5, 0.0}})), std::invalid_argument);
  CHECK_THROWS_AS(gf_moment_integer(MomentQuery(3, {1.5}, {1.0})), DomainError);
  const MomentQuery q(3, {0.5, cplx{0.0, 0.7}}, {1.0, 2.0});
  CHECK(q.norm() == doctest::Approx(0.7));
  CHECK(q.is_integer());
  CHECK_FALSE(MomentQuery(3, {0.5}, {-1.0}).is_integer());
  CHECK(as_nonnegative_integer(cplx{3.0, 1e-13}) == 3);
  CHECK_FALSE(as_nonnegative_integer(cplx{2.5, 0.0}).has_value());
  CHECK(principal_pow(0.0, cplx{0.5, 0.0}) == cplx{0.0});
  CHECK(std::abs(principal_pow(cplx{-4.0, 0.0}, 0.5) - cplx{0.0, 2.0}) < 1e-15);
  CHECK(int_pow(cplx{0.0, 2.0}, 3) == cplx{0.0, -8.0});
  CHECK(int_pow(2.0, -2) == cplx{0.25});
}
