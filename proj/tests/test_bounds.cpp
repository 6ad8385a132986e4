#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "flg/bounds.hpp"

using namespace flg;

TEST_CASE("harmonic numbers") {
  CHECK(bounds::harmonic(0) == 0.0);
  CHECK(bounds::harmonic(1) == 1.0);
  CHECK(bounds::harmonic(4) == doctest::Approx(25.0 / 12.0).epsilon(1e-15));
  CHECK(bounds::harmonic(10) == doctest::Approx(2.9289682539682538).epsilon(1e-12));
  CHECK_THROWS(bounds::harmonic(-1));
  CHECK(bounds::harmonic_diff(10, 4) ==
        doctest::Approx(bounds::harmonic(10) - bounds::harmonic(4)).epsilon(1e-12));
}

TEST_CASE("harmonic bracket gamma + ln n <= H(n) <= 1 + ln n up to 1e6") {
  double h = 0.0;
  for (long long n = 1; n <= 1000000; ++n) {
    h += 1.0 / n;
    double ln = std::log(static_cast<double>(n));
    REQUIRE(h >= bounds::kEulerGamma + ln - 1e-9);
    REQUIRE(h <= 1.0 + ln + 1e-9);
  }
}

TEST_CASE("(1 + 1/r)^r stays below e for integer r") {
  const double e = 2.718281828459045;
  for (long long r = 1; r <= 1000000; r = (r < 100 ? r + 1 : r * 3 / 2)) {
    CHECK(std::pow(1.0 + 1.0 / r, static_cast<double>(r)) < e);
  }
}

TEST_CASE("scalar_maximize on a parabola") {
  auto f = [](double x) { return -(x - 2.0) * (x - 2.0); };
  bounds::ScalarMaxResult res = bounds::scalar_maximize(f, 0.0, 5.0, 1e-8);
  CHECK(res.argmax == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(res.max == doctest::Approx(0.0).scale(1).epsilon(1e-10));
  CHECK(res.invalid_count == 0);
}

TEST_CASE("scalar_maximize reports non-finite samples") {
  auto f = [](double x) { return x < 1.0 ? std::nan("") : -x; };
  bounds::ScalarMaxResult res = bounds::scalar_maximize(f, 0.0, 2.0, 1e-6);
  CHECK(res.invalid_count > 0);
  CHECK(res.first_invalid_x == doctest::Approx(0.0));
  CHECK(res.argmax == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("PoS upper-bound expression and its 2.36 maximum") {
  CHECK(bounds::pos_ub(1.0) == doctest::Approx(5.0 / 3.0).epsilon(1e-12));
  CHECK(bounds::pos_ub(2.47) == doctest::Approx(2.359).epsilon(1e-3));
  bounds::BoundCurve curve = bounds::pos_ub_curve(1.0, 100.0);
  CHECK(curve.max >= 2.35);
  CHECK(curve.max <= 2.37);
  CHECK(curve.argmax >= 2.3);
  CHECK(curve.argmax <= 2.6);
  CHECK(curve.samples.front().first == doctest::Approx(1.0));
  CHECK(std::is_sorted(curve.samples.begin(), curve.samples.end()));
}

TEST_CASE("asymptotic PoS lower-bound expression and its 1.45 maximum") {
  CHECK(bounds::pos_lb_asymptotic(1.0) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(bounds::pos_lb_asymptotic(0.18) == doctest::Approx(1.455).epsilon(1e-3));
  bounds::BoundCurve curve = bounds::pos_lb_asymptotic_curve(0.01, 0.99);
  CHECK(curve.max >= 1.45);
  CHECK(curve.max <= 1.47);
  CHECK(curve.argmax >= 0.15);
  CHECK(curve.argmax <= 0.22);
}

TEST_CASE("pos_lb_table reproduces the reported estimates") {
  bounds::PosLbTableQuery q8;
  q8.n = 100000000;
  q8.remain_fraction = 0.27;
  CHECK(std::abs(bounds::pos_lb_table(q8).value - 1.7716) <= 0.005);

  bounds::PosLbTableQuery q6;
  q6.n = 1000000;
  q6.remain_fraction = 0.27;
  CHECK(std::abs(bounds::pos_lb_table(q6).value - 1.76927) <= 0.01);

  bounds::PosLbTableQuery q2;
  q2.n = 100;
  q2.maximize_r = true;
  CHECK(std::abs(bounds::pos_lb_table(q2).value - 1.52471) <= 0.02);
}

TEST_CASE("pos_lb_table is monotone over the table's n values") {
  double prev = 0.0;
  for (long long n : {100LL, 10000LL, 1000000LL, 100000000LL}) {
    bounds::PosLbTableQuery q;
    q.n = n;
    q.maximize_r = true;
    double v = bounds::pos_lb_table(q).value;
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("pos_lb_table input validation") {
  bounds::PosLbTableQuery q;
  q.n = 10; // not a perfect square
  CHECK_THROWS(bounds::pos_lb_table(q));
}

TEST_CASE("metric SPoA upper-bound curve") {
  const double e = 2.718281828459045;
  // at alpha = e, gamma = 0.5, y = e the inner term y - alpha ln y vanishes
  double denom_inner = e - e * std::log(e) + e * (0.5 + std::log(e) - 1.0);
  CHECK(denom_inner == doctest::Approx(0.5 * e).epsilon(1e-12));

  bounds::BoundCurve curve = bounds::metric_spoa_ub_curve(1.0, 1e6, e, 0.5, 20000);
  CHECK(std::isfinite(curve.max));
  CHECK(curve.max > 1.0 + 2.0 * e);
  CHECK(curve.max < 100.0);

  // the alpha = 1 variant is finite with an interior maximum as well
  bounds::BoundCurve one = bounds::metric_spoa_ub_curve(1.0, 1e6, 1.0, 0.5, 20000);
  CHECK(std::isfinite(one.max));
  CHECK(one.argmax > 1.0);
  CHECK(one.argmax < 1e6);
}

TEST_CASE("metric SPoA eq-15 integer cells and their maximum") {
  CHECK(bounds::metric_spoa_eq15(1, 1, 1.0) == doctest::Approx(3.0)); // H-diff vanishes
  // continuous relaxation dominates the integer cells (same y, gamma = 0.5)
  const double e = 2.718281828459045;
  for (long long a = 1; a <= 30; ++a) {
    for (long long r = 1; r <= a; ++r) {
      double cell = bounds::metric_spoa_eq15(a, r, e);
      if (std::isnan(cell)) continue;
      double cont = bounds::metric_spoa_ub(static_cast<double>(a) / r, e, 0.5);
      if (!std::isnan(cont)) CHECK(cell <= cont + 1e-9);
    }
  }
  bounds::Eq15Max mx = bounds::metric_spoa_eq15_max(e, 20);
  CHECK(std::isfinite(mx.max));
  CHECK(mx.max >= 1.0 + 2.0 * e);
}

TEST_CASE("pos_lb_table at n = 1e4 and the r-convention") {
  bounds::PosLbTableQuery q;
  q.n = 10000;
  q.remain_fraction = 0.27;
  CHECK(std::abs(bounds::pos_lb_table(q).value - 1.74604) <= 0.01);

  // maximizing over integer r lands exactly on the 0.27 sqrt(n) remainder
  bounds::PosLbTableQuery qm;
  qm.n = 10000;
  qm.maximize_r = true;
  bounds::PosLbTableResult res = bounds::pos_lb_table(qm);
  CHECK(res.r == 73); // k - ceil(0.27 k) with k = 100
}
