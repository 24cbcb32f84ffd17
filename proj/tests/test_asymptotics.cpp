#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "permoments/asymptotics.hpp"
#include "permoments/errors.hpp"
#include "permoments/moments.hpp"
#include "permoments/series.hpp"

using namespace permoments;

namespace {

long long choose(int n, int k) {
  long long c = 1;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

const double kPhis[] = {1.0, 2.0, 0.5};

}  // namespace

TEST_CASE("unit circle normalisation") {
  const cplx x = std::polar(1.0 + 5e-13, 0.7);
  CHECK(std::abs(std::abs(on_unit_circle(x)) - 1.0) < 1e-15);
  CHECK_THROWS_AS(on_unit_circle(std::polar(1.01, 0.7)), DomainError);
  CHECK_THROWS_AS(on_unit_circle(0.5), DomainError);
}

TEST_CASE("root of unity detection") {
  const cplx i{0.0, 1.0};
  CHECK_FALSE(check_not_root_of_unity(i, 4));
  CHECK(check_not_root_of_unity(i, 3));
  CHECK(check_not_root_of_unity(std::polar(1.0, 1.0), 40));
  CHECK_FALSE(check_not_root_of_unity(std::polar(1.0, 2.0 * std::numbers::pi / 5 + 1e-12), 5));
  CHECK_THROWS_AS(leading_terms(2, 2, i), DomainError);
  CHECK_THROWS_AS(predict_abs_moment(2, std::polar(1.0, std::numbers::pi / 2), 10), DomainError);
}

TEST_CASE("collapsed exponents") {
  CHECK(collapsed_exponent(1, 1, 0) == -2);
  CHECK(collapsed_exponent(1, 1, 1) == 1);
  CHECK(collapsed_exponent(1, 1, -1) == 1);
  CHECK(collapsed_exponent(2, 0, 2) == -1);
  CHECK(collapsed_exponent(3, 3, 0) == -20);
}

TEST_CASE("collected factors give the same series") {
  for (int s1 = 0; s1 <= 2; ++s1)
    for (int s2 = 0; s2 <= 2; ++s2) {
      const cplx x = std::polar(1.0, 0.9 + 0.3 * s1 + 0.1 * s2);
      FactorList raw, collected;
      for (int k1 = 0; k1 <= s1; ++k1)
        for (int k2 = 0; k2 <= s2; ++k2)
          raw.factors.push_back({std::pow(x, k1) * std::pow(std::conj(x), k2),
                                 double(((k1 + k2) % 2 ? 1 : -1) * choose(s1, k1) * choose(s2, k2))});
      for (int k = -s2; k <= s1; ++k)
        collected.factors.push_back({std::pow(x, k), double(collapsed_exponent(s1, s2, k))});
      const auto a = raw.expand(30), b = collected.expand(30);
      for (std::size_t j = 0; j <= 30; ++j)
        CHECK(std::abs(a[j] - b[j]) < 1e-9 * std::max(1.0, std::abs(b[j])));
    }
}

TEST_CASE("dominant poles follow the mod-4 table") {
  for (int s1 = 0; s1 <= 12; ++s1)
    for (int s2 = 0; s2 <= 12; ++s2) {
      if (s1 + s2 == 0) continue;
      const auto poles = dominant_poles(s1, s2);
      CHECK(poles.k0 == case_table_k0(s1, s2));
      CHECK(poles.order == choose(s1 + s2, s2 + poles.k0.front()));
    }
  CHECK(dominant_poles(1, 1).order == 2);
  CHECK(dominant_poles(2, 0).k0 == std::vector<int>{0, 2});
}

TEST_CASE("leading constants") {
  for (double phi : kPhis) {
    const cplx x = std::polar(1.0, phi);
    CHECK(std::abs(leading_constant(1, 1, 0, x) - std::norm(1.0 - x)) < 1e-12);
    // (1,0): E[Z_n] = 1 - x exactly
    CHECK(std::abs(leading_constant(1, 0, 0, x) - (1.0 - x)) < 1e-12);
    for (int s1 = 0; s1 <= 4; ++s1)
      for (int s2 = 0; s2 <= 4; ++s2)
        for (int k0 = -s1; k0 <= s2; k0 += 1) {
          if (s1 + s2 == 0 || k0 % 2 != 0) continue;
          CHECK(std::abs(leading_constant(s1, s2, -k0, x) - std::conj(leading_constant(s2, s1, k0, x))) <
                1e-12 * std::max(1.0, std::abs(leading_constant(s2, s1, k0, x))));
        }
  }
  CHECK_THROWS_AS(leading_constant(2, 2, 1, std::polar(1.0, 1.0)), std::invalid_argument);
  CHECK_THROWS_AS(leading_constant(2, 2, 4, std::polar(1.0, 1.0)), std::invalid_argument);
}

TEST_CASE("ratio convergence on the test grid") {
  const std::pair<int, int> pairs[] = {{1, 0}, {1, 1}, {2, 0}, {2, 1}, {2, 2}, {3, 1}};
  for (auto [s1, s2] : pairs)
    for (double phi : kPhis) {
      const auto p = leading_terms(s1, s2, std::polar(1.0, phi));
      const auto r1 = verify_ratio(p, 1250), r2 = verify_ratio(p, 2500), r3 = verify_ratio(p, 5000);
      if (r1.prediction_vanishes || r2.prediction_vanishes || r3.prediction_vanishes) continue;
      CHECK(r2.deviation() < r1.deviation() + 0.01);
      CHECK(r3.deviation() < r2.deviation() + 0.01);
      CHECK(r3.deviation() < 0.05);
    }
}

TEST_CASE("absolute moments") {
  for (double phi : kPhis) {
    const cplx x = std::polar(1.0, phi);
    CHECK(predict_abs_moment(1, x, 100) == doctest::Approx(100.0 * std::norm(1.0 - x)).epsilon(1e-12));
    for (int s = 1; s <= 3; ++s) {
      const auto p = leading_terms(s, s, x);
      CHECK(predict_abs_moment(s, x, 5000) ==
            doctest::Approx(std::abs(predict_mixed_moment(p, 5000))).epsilon(1e-10));
    }
    const double exact =
        gf_moment_integer(MomentQuery(5000, {x, std::conj(x)}, {2.0, 2.0})).real();
    CHECK(std::abs(exact / predict_abs_moment(2, x, 5000) - 1.0) < 0.01);
  }
  CHECK_THROWS_AS(predict_abs_moment(0, std::polar(1.0, 1.0), 5), std::invalid_argument);
}

TEST_CASE("higher moments stay accurate for large pole orders") {
  // (3,3) has a pole of order 20 at t = 1
  const cplx x = std::polar(1.0, 1.0);
  double previous = 1.0;
  for (long long n : {5000LL, 20000LL}) {
    const auto r = verify_ratio(3, 3, x, n);
    REQUIRE_FALSE(r.prediction_vanishes);
    CHECK(r.deviation() < previous);
    CHECK(r.deviation() < 1e-3);
    previous = r.deviation();
  }
}

TEST_CASE("real and imaginary parts") {
  for (double phi : kPhis) {
    const cplx x = std::polar(1.0, phi);
    const auto means = real_imag_expectations(x);
    CHECK(means.real == doctest::Approx(1.0 - std::cos(phi)));
    CHECK(means.imag == doctest::Approx(-std::sin(phi)));
    for (long long n = 1; n <= 20; ++n) {
      const auto e = exact_real_imag_moment(1, x, n);
      CHECK(std::abs(e.real - means.real) < 1e-10);
      CHECK(std::abs(e.imag - means.imag) < 1e-10);
    }
    for (int s = 1; s <= 6; ++s) {
      const auto g = real_imag_moment_growth(s, x);
      CHECK(g.order == choose(s, s / 2));
      CHECK(g.real_part.imag_residue < 1e-10);
      CHECK(g.imag_part.imag_residue < 1e-10);
      // coefficients carry 1/(M-1)!; compare on that scale
      double factorial = 1.0;
      for (long long m = 2; m < g.order; ++m) factorial *= double(m);
      CHECK_FALSE(g.real_part.is_zero(1e-12 / factorial));
      CHECK_FALSE(g.imag_part.is_zero(1e-12 / factorial));
    }
    const auto g2 = real_imag_moment_growth(2, x);
    const auto e2 = exact_real_imag_moment(2, x, 5000);
    CHECK(std::abs(e2.real / g2.predict_real(5000) - 1.0) < 0.05);
    CHECK(std::abs(e2.imag / g2.predict_imag(5000) - 1.0) < 0.05);
    CHECK(g2.predict_real(5000) == doctest::Approx(5000.0 * std::norm(1.0 - x) / 2.0).epsilon(1e-9));
  }
}

TEST_CASE("growth of higher real and imaginary moments") {
  const cplx x = std::polar(1.0, 1.0);
  for (int s = 3; s <= 4; ++s) {
    const auto g = real_imag_moment_growth(s, x);
    double checked = 0;
    for (long long n : {4000LL, 4500LL, 5000LL}) {
      const auto e = exact_real_imag_moment(s, x, n);
      const double scale = std::pow(double(n), double(g.exponent()));
      double size = 0.0;
      for (double c : g.real_part.cos_coeffs) size += std::abs(c);
      for (double c : g.real_part.sin_coeffs) size += std::abs(c);
      const double pred = g.predict_real(n);
      if (std::abs(pred) < 0.2 * size * scale) continue;
      ++checked;
      CHECK(std::abs(e.real / pred - 1.0) < 0.05);
    }
    CHECK(checked > 0);
  }
}

TEST_CASE("trigonometric series evaluation") {
  TrigSeries t;
  t.cos_coeffs = {1.0, 0.5};
  t.sin_coeffs = {0.0, -2.0};
  CHECK(t.evaluate(0.3) == doctest::Approx(1.0 + 0.5 * std::cos(0.6) - 2.0 * std::sin(0.6)));
  CHECK_FALSE(t.is_zero());
  CHECK(TrigSeries{{0.0}, {1e-14}, 0.0}.is_zero(1e-12));
}

TEST_CASE("ratio CSV") {
  std::ostringstream os;
  write_ratio_csv_header(os);
  CHECK(os.str() == "n,exact_re,exact_im,pred_re,pred_im,ratio_abs\n");
  std::ostringstream row;
  write_ratio_csv_row(row, verify_ratio(1, 0, std::polar(1.0, 1.0), 10));
  const std::string line = row.str();
  CHECK(line.rfind("10,", 0) == 0);
  CHECK(std::count(line.begin(), line.end(), ',') == 5);
  RatioCheck vanishing;
  vanishing.n = 3;
  vanishing.prediction_vanishes = true;
  std::ostringstream empty;
  write_ratio_csv_row(empty, vanishing);
  CHECK(empty.str().back() == '\n');
  CHECK(empty.str()[empty.str().size() - 2] == ',');
}
