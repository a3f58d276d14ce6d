#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "procure/error.hpp"
#include "procure/fitkit.hpp"
#include "procure/truncated_normal.hpp"

using namespace procure;
using namespace procure::fitkit;

namespace {

std::vector<double> tn_data(std::size_t n, std::uint64_t seed) {
  RandomStream rng(seed);
  return TruncatedNormal(50.0, 8.0, 30.0, 70.0).sample(rng, n);
}

std::vector<double> pareto_data(std::size_t n, double scale, double shape, std::uint64_t seed) {
  RandomStream rng(seed);
  std::vector<double> out(n);
  for (auto& x : out) x = scale * std::pow(rng.uniform(), -1.0 / shape);
  return out;
}

double tn_loglik(std::span<const double> x, double mu, double sigma, double a, double b) {
  const TruncatedNormal d(mu, sigma, a, b);
  double ll = 0.0;
  for (double v : x) ll += std::log(d.pdf(v));
  return ll;
}

/// sup |F_n - F| by direct evaluation on both sides of each point.
template <typename Cdf>
double brute_force_ks(std::vector<double> x, Cdf cdf) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::size_t below = 0, at_or_below = 0;
    for (double v : x) {
      below += v < x[i];
      at_or_below += v <= x[i];
    }
    d = std::max({d, std::abs(below / n - cdf(x[i])), std::abs(at_or_below / n - cdf(x[i]))});
  }
  return d;
}

}  // namespace

TEST_CASE("family names") {
  for (Family f : all_families()) CHECK(parse_family(to_string(f)) == f);
  try {
    parse_family("gamma");
    FAIL("expected invalid_argument");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::invalid_argument);
    const std::string msg = e.what();
    CHECK(msg.find("truncated-normal") != std::string::npos);
    CHECK(msg.find("pareto") != std::string::npos);
    CHECK(msg.find("negative-binomial") != std::string::npos);
  }
}

TEST_CASE("truncated-normal MLE recovers parameters and is stationary") {
  const auto data = tn_data(10000, 1);
  const auto r = fit(Family::truncated_normal, data, Bounds{30.0, 70.0});
  CHECK(r.free_parameters == 2);
  CHECK(r.params[0] == doctest::Approx(50.0).epsilon(0.02));
  CHECK(r.params[1] == doctest::Approx(8.0).epsilon(0.02));
  const double mu = r.params[0], sigma = r.params[1];
  CHECK(r.log_likelihood == doctest::Approx(tn_loglik(data, mu, sigma, 30, 70)).epsilon(1e-10));
  const double dmu = oracle::derivative(
      [&](double m) { return tn_loglik(data, m, sigma, 30, 70); }, mu, 1e-4);
  const double dsigma = oracle::derivative(
      [&](double s) { return tn_loglik(data, mu, s, 30, 70); }, sigma, 1e-4);
  CHECK(std::abs(dmu) < 1e-3);
  CHECK(std::abs(dsigma) < 1e-3);
}

TEST_CASE("truncated-normal without bounds uses min/max and counts them") {
  const auto data = tn_data(2000, 2);
  const auto r = fit(Family::truncated_normal, data);
  CHECK(r.free_parameters == 4);
  CHECK(r.params[2] == *std::min_element(data.begin(), data.end()));
  CHECK(r.params[3] == *std::max_element(data.begin(), data.end()));
  CHECK_FALSE(r.notes.empty());
}

TEST_CASE("fit errors") {
  const std::vector<double> constant(100, 42.0);
  try {
    fit(Family::truncated_normal, constant, Bounds{30.0, 70.0});
    FAIL("expected degenerate_data");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::degenerate_data);
  }
  try {
    fit(Family::truncated_normal, std::vector<double>{});
    FAIL("expected empty_data");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::empty_data);
  }
  try {
    fit(Family::truncated_normal, std::vector<double>{20.0, 50.0, 60.0}, Bounds{30.0, 70.0});
    FAIL("expected data_outside_support");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::data_outside_support);
  }
  CHECK_THROWS_AS(fit(Family::pareto, std::vector<double>{-1.0, 2.0, 3.0}), Error);
  CHECK_THROWS_AS(compare(std::vector<double>{}, all_families()), Error);
}

TEST_CASE("AIC and BIC identities") {
  const auto data = tn_data(500, 3);
  const auto cmp = compare(data, all_families(), Bounds{30.0, 70.0});
  for (const auto& r : cmp.ranking) {
    const double k = static_cast<double>(r.free_parameters);
    const double n = static_cast<double>(r.sample_size);
    CHECK(r.aic == 2.0 * k - 2.0 * r.log_likelihood);
    CHECK(r.bic == k * std::log(n) - 2.0 * r.log_likelihood);
  }
}

TEST_CASE("KS statistic equals a brute-force empirical CDF scan") {
  const auto data = tn_data(400, 4);
  const auto tn = fit(Family::truncated_normal, data, Bounds{30.0, 70.0});
  const TruncatedNormal d(tn.params[0], tn.params[1], 30.0, 70.0);
  CHECK(tn.ks_statistic ==
        doctest::Approx(brute_force_ks(data, [&](double x) { return d.cdf(x); })).epsilon(1e-12));
  const auto pa = fit(Family::pareto, data);
  const double scale = pa.params[0], shape = pa.params[1];
  CHECK(pa.ks_statistic == doctest::Approx(brute_force_ks(data, [&](double x) {
                                             return x <= scale ? 0.0
                                                               : 1.0 - std::pow(scale / x, shape);
                                           })).epsilon(1e-12));
}

TEST_CASE("fits are invariant to data order") {
  auto data = tn_data(300, 5);
  const auto a = compare(data, all_families(), Bounds{30.0, 70.0});
  std::reverse(data.begin(), data.end());
  std::shuffle(data.begin(), data.end(), std::mt19937_64(1));
  const auto b = compare(data, all_families(), Bounds{30.0, 70.0});
  REQUIRE(a.ranking.size() == b.ranking.size());
  for (std::size_t i = 0; i < a.ranking.size(); ++i) {
    CHECK(a.ranking[i].family == b.ranking[i].family);
    CHECK(a.ranking[i].params == b.ranking[i].params);
    CHECK(a.ranking[i].log_likelihood == b.ranking[i].log_likelihood);
  }
}

TEST_CASE("pareto MLE closed form maximizes the likelihood") {
  const auto data = pareto_data(5000, 10.0, 1.5, 6);
  const auto r = fit(Family::pareto, data);
  CHECK(r.params[1] == doctest::Approx(1.5).epsilon(0.05));
  auto ll = [&](double shape) {
    const double scale = r.params[0];
    double s = 0.0;
    for (double x : data) s += std::log(shape) + shape * std::log(scale) - (shape + 1) * std::log(x);
    return s;
  };
  CHECK(r.log_likelihood == doctest::Approx(ll(r.params[1])).epsilon(1e-12));
  CHECK(std::abs(oracle::derivative(ll, r.params[1], 1e-5)) < 1e-3);
}

TEST_CASE("negative-binomial MLE recovers parameters") {
  std::mt19937_64 gen(7);
  std::negative_binomial_distribution<int> nb(12, 0.2);  // mean 48, var 240
  std::vector<double> data(20000);
  for (auto& x : data) x = nb(gen);
  const auto r = fit(Family::negative_binomial, data);
  CHECK(r.params[0] == doctest::Approx(12.0).epsilon(0.05));
  CHECK(r.params[1] == doctest::Approx(0.2).epsilon(0.05));
  const double size = r.params[0];
  auto ll = [&](double s) {
    double mean = 0.0;
    for (double x : data) mean += x;
    mean /= static_cast<double>(data.size());
    const double p = s / (s + mean);
    double total = 0.0;
    for (double k : data) {
      total += std::lgamma(k + s) - std::lgamma(s) - std::lgamma(k + 1) + s * std::log(p) +
               k * std::log1p(-p);
    }
    return total;
  };
  CHECK(r.log_likelihood == doctest::Approx(ll(size)).epsilon(1e-9));
  CHECK(std::abs(oracle::derivative(ll, size, 1e-4)) < 1e-2);
}

TEST_CASE("negative-binomial without overdispersion reports nonconvergence") {
  const std::vector<double> flat{50, 50, 51, 49, 50, 50, 51, 49};
  try {
    fit(Family::negative_binomial, flat);
    FAIL("expected nonconvergence");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::nonconvergence);
  }
}

TEST_CASE("model selection on synthetic data") {
  const auto data = tn_data(10000, 8);
  const auto cmp = compare(data, all_families(), Bounds{30.0, 70.0});
  REQUIRE_FALSE(cmp.ranking.empty());
  CHECK(cmp.ranking.front().family == Family::truncated_normal);
  const auto single = compare(data, std::vector<Family>{Family::pareto});
  CHECK(single.ranking.size() == 1);

  const auto heavy = pareto_data(2000, 10.0, 1.5, 9);
  const auto hc = compare(heavy, std::vector<Family>{Family::truncated_normal, Family::pareto});
  REQUIRE(hc.ranking.size() == 2);
  CHECK(hc.ranking.front().family == Family::pareto);
}

TEST_CASE("truncated-normal ranked first in at least 95 of 100 repetitions") {
  int wins = 0;
  for (std::uint64_t rep = 0; rep < 100; ++rep) {
    const auto data = tn_data(500, 1000 + rep);
    const auto cmp = compare(data, all_families(), Bounds{30.0, 70.0});
    wins += !cmp.ranking.empty() && cmp.ranking.front().family == Family::truncated_normal;
  }
  CHECK(wins >= 95);
}

TEST_CASE("histogram RMSE is small for the true model") {
  const auto data = tn_data(100000, 10);
  const auto r = fit(Family::truncated_normal, data, Bounds{30.0, 70.0});
  CHECK(r.rmse < 2e-3);
  const auto p = fit(Family::pareto, data);
  CHECK(p.rmse > r.rmse);
}
