#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "procure/error.hpp"
#include "procure/normal.hpp"
#include "procure/random.hpp"
#include "procure/truncated_normal.hpp"

using namespace procure;

namespace {
const TruncatedNormal base(50.0, 8.0, 30.0, 70.0);
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

TEST_CASE("standard normal functions") {
  CHECK(normal::pdf(0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-15));
  CHECK(normal::cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(normal::cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-13));
  CHECK(normal::survival(8.0) == doctest::Approx(6.220960574271785e-16).epsilon(1e-10));
  CHECK(normal::cdf(-8.0) == doctest::Approx(6.220960574271785e-16).epsilon(1e-10));
  CHECK(normal::quantile(0.0) == -kInf);
  CHECK(normal::quantile(1.0) == kInf);
  for (double p : {1e-300, 1e-12, 1e-6, 0.01, 0.3, 0.5, 0.7, 0.99, 1.0 - 1e-9}) {
    const double z = normal::quantile(p);
    const double back = p < 0.5 ? normal::cdf(z) : 1.0 - normal::survival(z);
    CHECK(std::abs(back - p) <= 1e-14 * std::max(1.0, 1.0 / p) * p + 1e-16);
  }
}

TEST_CASE("pdf: support, normalization and standard limit") {
  CHECK(base.pdf(29.9) == 0.0);
  CHECK(base.pdf(70.1) == 0.0);
  const TruncatedNormal wide(0.0, 1.0, -1e6, 1e6);
  CHECK(wide.pdf(0.0) == doctest::Approx(0.3989423).epsilon(1e-7));
  const double integral = oracle::simpson([](double x) { return base.pdf(x); }, 30.0, 70.0);
  CHECK(integral == doctest::Approx(1.0).epsilon(1e-10));
  // Density at the mode equals phi(0) / (sigma Z).
  CHECK(base.pdf(50.0) == doctest::Approx(normal::inv_sqrt_2pi / (8.0 * base.normalizer())));
}

TEST_CASE("cdf matches integrated pdf") {
  CHECK(base.cdf(50.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(base.cdf(30.0) == 0.0);
  CHECK(base.cdf(70.0) == 1.0);
  CHECK(base.cdf(10.0) == 0.0);
  CHECK(base.cdf(90.0) == 1.0);
  for (double x : {31.0, 42.5, 58.0, 66.0, 69.9}) {
    const double q = oracle::simpson([](double t) { return base.pdf(t); }, 30.0, x);
    CHECK(base.cdf(x) == doctest::Approx(q).epsilon(1e-10));
    CHECK(base.survival(x) == doctest::Approx(1.0 - q).epsilon(1e-10));
  }
}

TEST_CASE("quantile: endpoints, symmetry, round trip") {
  CHECK(base.quantile(0.5) == doctest::Approx(50.0).epsilon(1e-13));
  CHECK(base.quantile(0.0) == 30.0);
  CHECK(base.quantile(1.0) == 70.0);
  CHECK(std::abs(base.cdf(base.quantile(0.9)) - 0.9) < 1e-9);
  double worst = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double u = i / 1000.0;
    worst = std::max(worst, std::abs(base.cdf(base.quantile(u)) - u));
  }
  CHECK(worst < 1e-9);
  CHECK_THROWS_AS(base.quantile(-0.1), Error);
  CHECK_THROWS_AS(base.quantile(1.1), Error);
}

TEST_CASE("quantile stays accurate deep in one tail") {
  const TruncatedNormal far(0.0, 1.0, 6.0, 9.0);
  for (double u : {1e-6, 0.25, 0.5, 0.75, 1.0 - 1e-6}) {
    CHECK(std::abs(far.cdf(far.quantile(u)) - u) < 1e-9);
  }
  const TruncatedNormal left(0.0, 1.0, -9.0, -6.0);
  for (double u : {1e-6, 0.5, 1.0 - 1e-6}) {
    CHECK(std::abs(left.cdf(left.quantile(u)) - u) < 1e-9);
  }
}

TEST_CASE("mean and variance") {
  CHECK(base.mean() == doctest::Approx(50.0).epsilon(1e-14));
  const TruncatedNormal half(0.0, 1.0, 0.0, kInf);
  CHECK(half.mean() == doctest::Approx(0.7978846).epsilon(1e-7));

  const double m1 = oracle::simpson([](double x) { return x * base.pdf(x); }, 30.0, 70.0);
  const double m2 = oracle::simpson(
      [&](double x) { return (x - m1) * (x - m1) * base.pdf(x); }, 30.0, 70.0);
  CHECK(std::abs(base.mean() - m1) < 1e-8);
  CHECK(std::abs(base.variance() - m2) < 1e-8);
  CHECK(base.variance() == doctest::Approx(58.3).epsilon(1e-3));
  CHECK(base.variance() < 64.0);

  const TruncatedNormal skew(50.0, 8.0, 40.0, 70.0);
  const auto draws = oracle::rejection_sample(50.0, 8.0, 40.0, 70.0, 1000000, 11);
  const auto mom = oracle::moments(draws);
  CHECK(std::abs(skew.mean() - mom.mean) < 3.0 * mom.se);
  CHECK(std::abs(skew.variance() - mom.variance) < 3.0 * mom.variance_se);
}

TEST_CASE("partial expectations") {
  CHECK(base.expected_excess(70.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(base.expected_excess(30.0) == doctest::Approx(20.0).epsilon(1e-13));
  CHECK(base.expected_leftover(30.0) == doctest::Approx(0.0).epsilon(1e-12));
  for (double q : {35.0, 50.0, 55.0, 64.0}) {
    const double excess =
        oracle::simpson([&](double x) { return (x - q) * base.pdf(x); }, q, 70.0);
    const double leftover =
        oracle::simpson([&](double x) { return (q - x) * base.pdf(x); }, 30.0, q);
    CHECK(std::abs(base.expected_excess(q) - excess) < 1e-8);
    CHECK(std::abs(base.expected_leftover(q) - leftover) < 1e-8);
  }
}

TEST_CASE("constructor validation") {
  CHECK_THROWS_AS(TruncatedNormal(50.0, 0.0, 30.0, 70.0), Error);
  CHECK_THROWS_AS(TruncatedNormal(50.0, -1.0, 30.0, 70.0), Error);
  CHECK_THROWS_AS(TruncatedNormal(50.0, 8.0, 70.0, 30.0), Error);
  CHECK_THROWS_AS(TruncatedNormal(0.0, 1.0, 50.0, 60.0), Error);  // negligible mass
  try {
    TruncatedNormal(50.0, -1.0, 30.0, 70.0);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::invalid_distribution);
  }
}

TEST_CASE("sampling: support, moments, determinism") {
  RandomStream rng(42);
  const auto x = base.sample(rng, 100000);
  CHECK(std::all_of(x.begin(), x.end(), [](double v) { return v >= 30.0 && v <= 70.0; }));
  const auto mom = oracle::moments(x);
  CHECK(std::abs(mom.mean - base.mean()) < 3.0 * mom.se);
  RandomStream a(7), b(7);
  CHECK(base.sample(a, 1000) == base.sample(b, 1000));
}

TEST_CASE("random streams") {
  RandomStream a(1), b(1), c(2);
  CHECK(a.next_u64() == b.next_u64());
  CHECK(a.next_u64() != c.next_u64());
  RandomStream d0 = RandomStream::derive(5, 0), d1 = RandomStream::derive(5, 1);
  CHECK(d0.next_u64() != d1.next_u64());
  RandomStream u(3);
  for (int i = 0; i < 10000; ++i) {
    const double v = u.uniform();
    REQUIRE(v > 0.0);
    REQUIRE(v < 1.0);
  }
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) counts[u.below(7)]++;
  for (int c7 : counts) CHECK(std::abs(c7 - 10000) < 500);
}
