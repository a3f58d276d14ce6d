#include <doctest.h>
#include <omp.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "procure/error.hpp"
#include "procure/kernels.hpp"
#include "procure/random.hpp"

using namespace procure;

namespace {

const TruncatedNormal dist(50.0, 8.0, 30.0, 70.0);
const kernels::MarginRates rates{120.0, 30.0, 40.0};

std::vector<double> uniforms(std::size_t n) {
  RandomStream rng(99);
  std::vector<double> u(n);
  rng.fill_uniform(u);
  return u;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

bool same_bits(const kernels::NewsvendorMoments& a, const kernels::NewsvendorMoments& b) {
  return same_bits(a.sales, b.sales) && same_bits(a.leftover, b.leftover) &&
         same_bits(a.excess, b.excess) && same_bits(a.demand, b.demand) &&
         same_bits(a.fill, b.fill) && same_bits(a.margin, b.margin) &&
         same_bits(a.margin_variance, b.margin_variance) && a.count == b.count;
}

}  // namespace

TEST_CASE("quantile transform: OpenMP equals serial elementwise") {
  const auto u = uniforms(3 * kernels::kBlockSize + 17);
  std::vector<double> s(u.size()), p(u.size());
  kernels::quantile_transform_serial(dist, u, s);
  kernels::quantile_transform(dist, u, p);
  CHECK(s == p);
}

TEST_CASE("quantile transform rejects levels outside [0,1] and size mismatch") {
  std::vector<double> u{0.2, 1.5}, out(2);
  CHECK_THROWS_AS(kernels::quantile_transform(dist, u, out), Error);
  std::vector<double> small(1);
  CHECK_THROWS_AS(kernels::quantile_transform(dist, std::vector<double>{0.1, 0.2}, small), Error);
}

TEST_CASE("newsvendor moments: OpenMP agrees with serial reference") {
  const auto u = uniforms(5 * kernels::kBlockSize + 123);
  std::vector<double> d(u.size());
  kernels::quantile_transform(dist, u, d);
  for (double q : {30.0, 45.0, 51.3, 70.0}) {
    const auto s = kernels::newsvendor_moments_serial(d, q, rates);
    const auto p = kernels::newsvendor_moments(d, q, rates);
    CHECK(p.count == s.count);
    CHECK(p.sales == doctest::Approx(s.sales).epsilon(1e-12));
    CHECK(p.leftover == doctest::Approx(s.leftover).epsilon(1e-12));
    CHECK(p.excess == doctest::Approx(s.excess).epsilon(1e-12));
    CHECK(p.demand == doctest::Approx(s.demand).epsilon(1e-12));
    CHECK(p.fill == doctest::Approx(s.fill).epsilon(1e-12));
    CHECK(p.margin == doctest::Approx(s.margin).epsilon(1e-12));
    CHECK(p.margin_variance == doctest::Approx(s.margin_variance).epsilon(1e-10));
    // Identities between the partial sums.
    CHECK(p.sales + p.excess == doctest::Approx(p.demand).epsilon(1e-12));
    CHECK(q - p.sales == doctest::Approx(p.leftover).epsilon(1e-12));
  }
}

TEST_CASE("reductions are bit-identical for every thread count") {
  const auto u = uniforms(7 * kernels::kBlockSize + 5);
  std::vector<double> d(u.size());
  kernels::quantile_transform(dist, u, d);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const auto ref = kernels::newsvendor_moments(d, 52.0, rates);
  std::vector<double> fill_ref(d.size());
  kernels::fill_rates(d, 52.0, fill_ref);
  for (int t : {2, 3, 4, 8}) {
    omp_set_num_threads(t);
    CHECK(same_bits(kernels::newsvendor_moments(d, 52.0, rates), ref));
    std::vector<double> fill(d.size());
    kernels::fill_rates(d, 52.0, fill);
    CHECK(fill == fill_ref);
  }
  omp_set_num_threads(saved);
}

TEST_CASE("fill rates: serial and OpenMP agree, bounded by one") {
  const auto u = uniforms(10000);
  std::vector<double> d(u.size()), a(u.size()), b(u.size());
  kernels::quantile_transform(dist, u, d);
  kernels::fill_rates_serial(d, 50.0, a);
  kernels::fill_rates(d, 50.0, b);
  CHECK(a == b);
  for (std::size_t i = 0; i < d.size(); ++i) {
    REQUIRE(b[i] <= 1.0);
    REQUIRE(b[i] == doctest::Approx(std::min(50.0, d[i]) / d[i]));
  }
}

TEST_CASE("empty draw set is rejected") {
  std::vector<double> none;
  CHECK_THROWS_AS(kernels::newsvendor_moments(none, 50.0, rates), Error);
  CHECK_THROWS_AS(kernels::newsvendor_moments_serial(none, 50.0, rates), Error);
}
