#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "qtomo/error.hpp"
#include "qtomo/quantile.hpp"
#include "support.hpp"

using namespace qtomo;
using qtest::throws_code;

namespace {

// Minimum of the check loss over the data values (the loss is piecewise linear
// with kinks only there, so this is the global minimum).
double grid_min_loss(const Sample1& s, double p) {
  double best = INFINITY;
  for (double v : s.values()) best = std::min(best, check_loss(s, v, p));
  return best;
}

}  // namespace

TEST_CASE("quantile examples") {
  const Sample1 a({1, 2, 3, 4});
  CHECK(quantile(a, 0.5, QuantileVersion::InfType1) == 2.0);
  const Sample1 one({5});
  CHECK(quantile(one, 0.3, QuantileVersion::InfType1) == 5.0);
  CHECK(quantile(one, 0.3, QuantileVersion::InterpolatedR7) == 5.0);

  const Sample1 pi({3, 1, 4, 1, 5, 9, 2, 6});
  const double q = quantile(pi, 0.25, QuantileVersion::InfType1);
  CHECK(q == 1.0);
  CHECK(check_loss(pi, q, 0.25) == doctest::Approx(grid_min_loss(pi, 0.25)).epsilon(1e-14));

  // Type 7 at rank 1 + 3 * 0.5 = 2.5 of {1,2,3,4}.
  CHECK(quantile(a, 0.5, QuantileVersion::InterpolatedR7) == 2.5);
}

TEST_CASE("quantile errors") {
  CHECK(throws_code([] { Sample1 s({}); }, ErrorCode::EmptySample));
  CHECK(throws_code([] { Sample1 s({1.0, NAN}); }, ErrorCode::NonFiniteValue));
  const Sample1 a({1, 2});
  for (double p : {0.0, 1.0, -0.1, 1.5})
    CHECK(throws_code([&] { quantile(a, p, QuantileVersion::InfType1); }, ErrorCode::InvalidP));
}

TEST_CASE("quantile set examples") {
  auto qs = quantile_set(Sample1({1, 2, 3, 4}), 0.5);
  CHECK(qs.lo == 2.0);
  CHECK(qs.hi == 3.0);
  qs = quantile_set(Sample1({1, 2, 3}), 0.5);
  CHECK((qs.lo == 2.0 && qs.hi == 2.0));
  qs = quantile_set(Sample1({1, 1, 1, 1}), 0.5);
  CHECK((qs.lo == 1.0 && qs.hi == 1.0));

  // The loss is flat on [2, 3] and larger outside it.
  const Sample1 s({1, 2, 3, 4});
  const double flat = check_loss(s, 2.0, 0.5);
  for (double u = 1.0; u <= 4.0; u += 0.01) {
    const double l = check_loss(s, u, 0.5);
    if (u >= 2.0 && u <= 3.0)
      CHECK(l == doctest::Approx(flat).epsilon(1e-14));
    else
      CHECK(l > flat);
  }
}

TEST_CASE("check loss examples") {
  CHECK(check_loss(Sample1({0}), 0.0, 0.3) == 0.0);
  CHECK(check_loss(Sample1({-1, 1}), 0.0, 0.5) == 0.5);
}

TEST_CASE("quantile set endpoints minimize the check loss") {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> small(0, 6);
  std::uniform_real_distribution<double> pu(0.01, 0.99);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> v(1 + trial % 25);
    for (double& x : v) x = small(rng) * 0.5;  // ties on purpose
    const Sample1 s(v);
    double p = pu(rng);
    if (trial % 3 == 0) p = double(1 + trial % v.size()) / double(v.size() + 1);
    const auto qs = quantile_set(s, p);
    const double best = grid_min_loss(s, p);
    CHECK(qs.lo <= qs.hi);
    CHECK(check_loss(s, qs.lo, p) <= best + 1e-12);
    CHECK(check_loss(s, qs.hi, p) <= best + 1e-12);
    CHECK(qs.lo == qtest::order_stat(v, type1_rank(p, v.size())));
  }
}

TEST_CASE("type-1 rank guards against p*n rounding") {
  CHECK(type1_rank(0.1, 10) == 1);
  CHECK(type1_rank(0.3, 10) == 3);  // 0.3 * 10 = 3.0000000000000004
  CHECK(type1_rank(0.7, 10) == 7);
  CHECK(type1_rank(1e-9, 10) == 1);
  for (std::size_t n = 1; n < 300; ++n)
    for (std::size_t k = 1; k <= n; ++k) CHECK(type1_rank(double(k) / double(n), n) == k);
}

TEST_CASE("equivariance and monotonicity") {
  std::mt19937_64 rng(22);
  std::normal_distribution<double> z;
  std::uniform_real_distribution<double> pu(0.01, 0.99);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(1 + trial % 40);
    for (double& x : v) x = z(rng);
    const double a = 0.5 + std::abs(z(rng)), b = z(rng);
    std::vector<double> w(v);
    for (double& x : w) x = a * x + b;
    const Sample1 s(v), t(w);
    double p1 = pu(rng), p2 = pu(rng);
    if (p1 > p2) std::swap(p1, p2);
    for (auto ver : {QuantileVersion::InfType1, QuantileVersion::InterpolatedR7}) {
      const double q = quantile(s, p1, ver);
      CHECK(quantile(t, p1, ver) == doctest::Approx(a * q + b).epsilon(1e-12));
      CHECK(q <= quantile(s, p2, ver));
      CHECK(q >= *std::min_element(v.begin(), v.end()));
      CHECK(q <= *std::max_element(v.begin(), v.end()));
    }
  }
}

TEST_CASE("directional quantile examples") {
  std::mt19937_64 rng(23);
  const auto pts = qtest::gaussian_points(101, rng);
  const Sample2 s(pts);
  std::vector<double> xs;
  for (const auto& p : pts) xs.push_back(p.x);
  CHECK(directional_quantile(s, UnitDirection(1, 0), 0.3, QuantileVersion::InfType1) ==
        quantile(Sample1(xs), 0.3, QuantileVersion::InfType1));

  const Sample2 col({{0, 0}, {0, 1}, {0, 2}});
  CHECK(directional_quantile(col, UnitDirection(0, 1), 0.5, QuantileVersion::InfType1) == 1.0);

  const Sample2 sq({{0, 0}, {1, 0}, {0, 1}, {1, 1}});
  CHECK(directional_quantile(sq, UnitDirection(1, 1), 0.5, QuantileVersion::InfType1) ==
        doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("directional Lipschitz bound and flip") {
  std::mt19937_64 rng(24);
  std::uniform_real_distribution<double> ang(0, 2 * std::numbers::pi), pu(0.01, 0.99);
  for (int trial = 0; trial < 300; ++trial) {
    const auto pts = qtest::uniform_points(5 + trial % 50, rng, -3, 3);
    const Sample2 s(pts);
    double m = 0.0;
    for (const auto& p : pts) m = std::max(m, std::hypot(p.x, p.y));
    const UnitDirection a = UnitDirection::from_angle(ang(rng));
    const UnitDirection b = UnitDirection::from_angle(ang(rng));
    const double p = pu(rng);
    const double qa = directional_quantile(s, a, p, QuantileVersion::InfType1);
    const double qb = directional_quantile(s, b, p, QuantileVersion::InfType1);
    CHECK(std::abs(qa - qb) <= m * norm(a.vec() - b.vec()) + 1e-12);

    // Without ties the k-th smallest along s is the (n+1-k)-th smallest along
    // -s, negated.
    const std::size_t n = pts.size(), k = type1_rank(p, n);
    const double from_flip = -qtest::order_stat(s.project(-a), n + 1 - k);
    CHECK(qa == doctest::Approx(from_flip).epsilon(1e-15));
  }
}

TEST_CASE("quantile_inplace agrees with the sorted oracle") {
  std::mt19937_64 rng(25);
  std::normal_distribution<double> z;
  std::uniform_real_distribution<double> pu(0.001, 0.999);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> v(1 + trial % 97);
    for (double& x : v) x = std::round(4 * z(rng)) / 4;
    const double p = pu(rng);
    std::vector<double> buf(v);
    CHECK(quantile_inplace(buf, p, QuantileVersion::InfType1) ==
          qtest::order_stat(v, type1_rank(p, v.size())));
    // R type 7 oracle.
    const double h = (double(v.size()) - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const double r7 = qtest::order_stat(v, lo + 1) +
                      (h - double(lo)) * (qtest::order_stat(v, std::min(lo + 2, v.size())) -
                                          qtest::order_stat(v, lo + 1));
    buf = v;
    CHECK(quantile_inplace(buf, p, QuantileVersion::InterpolatedR7) ==
          doctest::Approx(r7).epsilon(1e-14));
  }
}
