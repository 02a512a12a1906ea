#include "meshmark/qim.hpp"
#include "meshmark/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

using namespace meshmark;

namespace {

// Nearest point of {k * delta + d : k integer} by scanning a window of k.
double brute_nearest(double x, double d, double delta) {
  const auto k0 = static_cast<long long>(std::floor(x / delta));
  double best = 0.0, best_dist = std::numeric_limits<double>::infinity();
  for (long long k = k0 - 3; k <= k0 + 3; ++k) {
    const double p = static_cast<double>(k) * delta + d;
    if (std::abs(p - x) < best_dist) {
      best_dist = std::abs(p - x);
      best = p;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("worked quantizer values") {
  const qim::QuantizerParams p{0.08};
  CHECK(qim::dither(0, p) == doctest::Approx(0.02));
  CHECK(qim::dither(1, p) == doctest::Approx(-0.02));
  CHECK(qim::quantize_bit(1.0, 0, p) == doctest::Approx(0.98).epsilon(1e-12));
  CHECK(qim::quantize_bit(1.0, 1, p) == doctest::Approx(1.02).epsilon(1e-12));
  CHECK(qim::quantize_bit(0.02, 0, p) == doctest::Approx(0.02).epsilon(1e-12));
  CHECK(qim::detect_bit(0.98, p) == 0);
  CHECK(qim::detect_bit(1.02, p) == 1);
  // Exactly halfway between the lattices.
  CHECK(qim::detect_bit(0.0, p) == 0);
  CHECK_THROWS(qim::check({0.0}));
  CHECK_THROWS(qim::check({-1.0}));
}

TEST_CASE("quantizer against brute-force lattice search") {
  for (double delta : {0.004, 0.08}) {
    const qim::QuantizerParams p{delta};
    Rng rng(delta == 0.004 ? 1 : 2);
    int mismatches = 0, roundtrip_errors = 0;
    double worst = 0.0;
    for (int i = 0; i < 20000; ++i) {
      const double x = rng.uniform(-3.0, 3.0);
      for (int b : {0, 1}) {
        const double q = qim::quantize_bit(x, b, p);
        if (q != brute_nearest(x, b == 0 ? delta / 4 : -delta / 4, delta)) ++mismatches;
        if (qim::detect_bit(q, p) != b) ++roundtrip_errors;
        worst = std::max(worst, std::abs(q - x));
      }
    }
    CAPTURE(delta);
    CHECK(mismatches == 0);
    CHECK(roundtrip_errors == 0);
    CHECK(worst <= 0.5 * delta + 1e-12);
  }
}

TEST_CASE("lattices interleave at half spacing") {
  const double delta = 0.08;
  const qim::QuantizerParams p{delta};
  std::vector<std::pair<double, int>> points;
  for (int k = -10; k <= 10; ++k) {
    points.emplace_back(k * delta + delta / 4, 0);
    points.emplace_back(k * delta - delta / 4, 1);
  }
  std::sort(points.begin(), points.end());
  for (std::size_t i = 1; i < points.size(); ++i) {
    CHECK(points[i].first - points[i - 1].first == doctest::Approx(delta / 2).epsilon(1e-9));
    CHECK(points[i].second != points[i - 1].second);
    CHECK(qim::detect_bit(points[i].first, p) == points[i].second);
  }
}

TEST_CASE("bounded quantization") {
  const double delta = 0.08;
  const qim::QuantizerParams p{delta};
  // Interior: same as unbounded.
  CHECK(qim::quantize_bit_bounded(1.0, 0, p, 0.5, 1.5) == qim::quantize_bit(1.0, 0, p));

  // Nearest 0-point of x = 0.501 is 0.50 - 0.08 + 0.02 ... scan the lattice by hand.
  const double lo = 0.505, hi = 0.7;
  for (int b : {0, 1}) {
    const double x = 0.506;
    const double q = qim::quantize_bit_bounded(x, b, p, lo, hi);
    double expected = 0.0, best = 1e9;
    for (int k = -50; k <= 50; ++k) {
      const double pt = k * delta + (b == 0 ? delta / 4 : -delta / 4);
      if (pt >= lo && pt <= hi && std::abs(pt - x) < best) {
        best = std::abs(pt - x);
        expected = pt;
      }
    }
    CHECK(q == doctest::Approx(expected).epsilon(1e-12));
    CHECK(q >= lo);
    CHECK(q <= hi);
    CHECK(qim::detect_bit(q, p) == b);
  }

  Rng rng(9);
  for (int i = 0; i < 5000; ++i) {
    const double a = rng.uniform(-2.0, 2.0);
    const double b = a + rng.uniform(2.0 * delta, 1.0);
    const double x = rng.uniform(a, b);
    const int bit = static_cast<int>(rng.below(2));
    const double q = qim::quantize_bit_bounded(x, bit, p, a, b);
    CHECK(q >= a);
    CHECK(q <= b);
    CHECK(qim::detect_bit(q, p) == bit);
  }
  CHECK_THROWS_AS(qim::quantize_bit_bounded(0.5, 0, p, 0.4, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(qim::quantize_bit_bounded(2.0, 0, p, 0.0, 1.0), std::invalid_argument);
}
