#include "procure/fitkit.hpp"

#include <algorithm>
#include <array>
#include <boost/math/distributions/negative_binomial.hpp>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <numeric>

#include "procure/truncated_normal.hpp"

namespace procure::fitkit {

std::string_view to_string(Family family) noexcept {
  switch (family) {
    case Family::truncated_normal: return "truncated-normal";
    case Family::pareto: return "pareto";
    case Family::negative_binomial: return "negative-binomial";
  }
  return "unknown";
}

const std::vector<Family>& all_families() {
  static const std::vector<Family> families{Family::truncated_normal, Family::pareto,
                                            Family::negative_binomial};
  return families;
}

Family parse_family(std::string_view name) {
  for (Family f : all_families()) {
    if (to_string(f) == name) return f;
  }
  fail(ErrorKind::invalid_argument,
       fmt::format("unknown family '{}'; valid families: truncated-normal, pareto, "
                   "negative-binomial",
                   name));
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct SimplexResult {
  std::array<double, 2> x{};
  double value = 0.0;
  bool converged = false;
};

// Nelder-Mead on R^2 with standard coefficients.
template <typename F>
SimplexResult nelder_mead(F&& f, std::array<double, 2> start, std::array<double, 2> step,
                          double tolerance, int max_iterations) {
  std::array<std::array<double, 2>, 3> pts{start, start, start};
  pts[1][0] += step[0];
  pts[2][1] += step[1];
  std::array<double, 3> vals{f(pts[0]), f(pts[1]), f(pts[2])};

  auto lerp = [](const std::array<double, 2>& a, const std::array<double, 2>& b, double t) {
    return std::array<double, 2>{a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])};
  };

  for (int it = 0; it < max_iterations; ++it) {
    std::array<int, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(), [&](int a, int b) { return vals[a] < vals[b]; });
    const auto best = pts[order[0]];
    const auto mid = pts[order[1]];
    const auto worst = pts[order[2]];
    const double f_best = vals[order[0]];
    const double f_mid = vals[order[1]];
    const double f_worst = vals[order[2]];

    double spread = 0.0;
    for (int k = 1; k < 3; ++k) {
      for (int d = 0; d < 2; ++d) {
        spread = std::max(spread, std::abs(pts[order[k]][d] - best[d]) /
                                      std::max(1.0, std::abs(best[d])));
      }
    }
    if (spread < tolerance && std::abs(f_worst - f_best) <= tolerance * (1.0 + std::abs(f_best))) {
      return {best, f_best, true};
    }

    const std::array<double, 2> centroid{0.5 * (best[0] + mid[0]), 0.5 * (best[1] + mid[1])};
    const auto reflected = lerp(centroid, worst, -1.0);
    const double f_r = f(reflected);
    if (f_r < f_best) {
      const auto expanded = lerp(centroid, worst, -2.0);
      const double f_e = f(expanded);
      if (f_e < f_r) {
        pts[order[2]] = expanded;
        vals[order[2]] = f_e;
      } else {
        pts[order[2]] = reflected;
        vals[order[2]] = f_r;
      }
      continue;
    }
    if (f_r < f_mid) {
      pts[order[2]] = reflected;
      vals[order[2]] = f_r;
      continue;
    }
    const bool outside = f_r < f_worst;
    const auto contracted = outside ? lerp(centroid, reflected, 0.5) : lerp(centroid, worst, 0.5);
    const double f_c = f(contracted);
    if (f_c < (outside ? f_r : f_worst)) {
      pts[order[2]] = contracted;
      vals[order[2]] = f_c;
      continue;
    }
    for (int k = 1; k < 3; ++k) {
      pts[order[k]] = lerp(best, pts[order[k]], 0.5);
      vals[order[k]] = f(pts[order[k]]);
    }
  }
  std::size_t arg = static_cast<std::size_t>(std::min_element(vals.begin(), vals.end()) - vals.begin());
  return {pts[arg], vals[arg], false};
}

struct SampleStats {
  double mean = 0.0;
  double sd = 0.0;
};

SampleStats stats_of(std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  SampleStats s;
  s.mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double sq = 0.0;
  for (double v : x) sq += (v - s.mean) * (v - s.mean);
  s.sd = x.size() > 1 ? std::sqrt(sq / (n - 1.0)) : 0.0;
  return s;
}

// Root-mean-square gap between the 40-bin normalized histogram and the fitted
// bin-average density (CDF difference over bin width).
template <typename Cdf>
double histogram_rmse(std::span<const double> sorted, Cdf&& cdf) {
  const double lo = sorted.front();
  const double hi = sorted.back();
  const double width = (hi - lo) / static_cast<double>(kHistogramBins);
  std::array<double, kHistogramBins> counts{};
  for (double x : sorted) {
    auto bin = static_cast<std::size_t>((x - lo) / width);
    counts[std::min(bin, kHistogramBins - 1)] += 1.0;
  }
  const double n = static_cast<double>(sorted.size());
  double sq = 0.0;
  for (std::size_t k = 0; k < kHistogramBins; ++k) {
    const double left = lo + static_cast<double>(k) * width;
    const double right = k + 1 == kHistogramBins ? hi : left + width;
    const double observed = counts[k] / (n * width);
    const double fitted = (cdf(right) - cdf(left)) / width;
    sq += (observed - fitted) * (observed - fitted);
  }
  return std::sqrt(sq / static_cast<double>(kHistogramBins));
}

void finish_metrics(FitReport& r) {
  const double k = static_cast<double>(r.free_parameters);
  const double n = static_cast<double>(r.sample_size);
  r.aic = 2.0 * k - 2.0 * r.log_likelihood;
  r.bic = k * std::log(n) - 2.0 * r.log_likelihood;
}

FitReport fit_truncated_normal(std::span<const double> sorted, std::optional<Bounds> fixed) {
  FitReport r;
  r.family = Family::truncated_normal;
  Bounds bounds;
  if (fixed) {
    bounds = *fixed;
    if (!(bounds.lower < bounds.upper)) {
      fail(ErrorKind::invalid_argument, "truncated-normal bounds need lower < upper");
    }
    if (sorted.front() < bounds.lower || sorted.back() > bounds.upper) {
      fail(ErrorKind::data_outside_support,
           fmt::format("data range [{}, {}] outside fixed bounds [{}, {}]", sorted.front(),
                       sorted.back(), bounds.lower, bounds.upper));
    }
    r.free_parameters = 2;
  } else {
    bounds = {sorted.front(), sorted.back()};
    r.free_parameters = 4;
    r.notes.push_back("bounds estimated from sample min/max");
  }
  const auto s = stats_of(sorted);
  if (!(s.sd > 0.0) || !(bounds.lower < bounds.upper)) {
    fail(ErrorKind::degenerate_data, "constant data: truncated-normal sigma estimate collapses to 0");
  }

  const double n = static_cast<double>(sorted.size());
  auto neg_ll = [&](const std::array<double, 2>& v) {
    const double mu = v[0];
    const double sigma = std::exp(v[1]);
    if (!std::isfinite(mu) || !std::isfinite(sigma)) return kInf;
    double z_mass;
    try {
      z_mass = TruncatedNormal(mu, sigma, bounds.lower, bounds.upper).normalizer();
    } catch (const Error&) {
      return kInf;
    }
    double sq = 0.0;
    for (double x : sorted) sq += (x - mu) * (x - mu);
    return n * std::log(sigma) + n * std::log(z_mass) + sq / (2.0 * sigma * sigma) +
           0.5 * n * std::log(2.0 * M_PI);
  };

  const auto result = nelder_mead(neg_ll, {s.mean, std::log(s.sd)}, {0.1 * s.sd, 0.1}, 1e-10, 20000);
  if (!result.converged || !std::isfinite(result.value)) {
    fail(ErrorKind::nonconvergence, "truncated-normal likelihood search did not converge");
  }
  const double mu = result.x[0];
  const double sigma = std::exp(result.x[1]);
  if (!(sigma > 1e-9 * std::max(1.0, std::abs(mu)))) {
    fail(ErrorKind::degenerate_data, "truncated-normal sigma estimate collapsed to 0");
  }
  const TruncatedNormal dist(mu, sigma, bounds.lower, bounds.upper);
  r.param_names = {"mu", "sigma", "lower", "upper"};
  r.params = {mu, sigma, bounds.lower, bounds.upper};
  r.sample_size = sorted.size();
  r.log_likelihood = -result.value;
  r.ks_statistic = ks_continuous(sorted, [&](double x) { return dist.cdf(x); });
  r.rmse = histogram_rmse(sorted, [&](double x) { return dist.cdf(x); });
  finish_metrics(r);
  return r;
}

FitReport fit_pareto(std::span<const double> sorted) {
  if (!(sorted.front() > 0.0)) {
    fail(ErrorKind::data_outside_support, "pareto needs strictly positive data");
  }
  const double scale = sorted.front();
  const double n = static_cast<double>(sorted.size());
  double log_sum = 0.0;
  double log_ratio_sum = 0.0;
  for (double x : sorted) {
    log_sum += std::log(x);
    log_ratio_sum += std::log(x / scale);
  }
  if (!(log_ratio_sum > 0.0)) {
    fail(ErrorKind::degenerate_data, "constant data: pareto shape estimate diverges");
  }
  const double shape = n / log_ratio_sum;
  auto cdf = [&](double x) { return x <= scale ? 0.0 : 1.0 - std::pow(scale / x, shape); };

  FitReport r;
  r.family = Family::pareto;
  r.param_names = {"scale", "shape"};
  r.params = {scale, shape};
  r.free_parameters = 2;
  r.sample_size = sorted.size();
  r.log_likelihood = n * std::log(shape) + n * shape * std::log(scale) - (shape + 1.0) * log_sum;
  r.ks_statistic = ks_continuous(sorted, cdf);
  r.rmse = histogram_rmse(sorted, cdf);
  finish_metrics(r);
  return r;
}

FitReport fit_negative_binomial(std::span<const double> sorted) {
  std::vector<double> counts(sorted.size());
  std::transform(sorted.begin(), sorted.end(), counts.begin(),
                 [](double x) { return std::round(x); });
  if (counts.front() < 0.0) {
    fail(ErrorKind::data_outside_support, "negative-binomial needs nonnegative data");
  }
  const double n = static_cast<double>(counts.size());
  const double mean = std::accumulate(counts.begin(), counts.end(), 0.0) / n;
  if (!(mean > 0.0)) fail(ErrorKind::degenerate_data, "negative-binomial needs a positive mean");
  double lgamma_k1 = 0.0;
  for (double k : counts) lgamma_k1 += std::lgamma(k + 1.0);

  auto profile_ll = [&](double size) {
    const double prob = size / (size + mean);
    double ll = -n * std::lgamma(size) - lgamma_k1 + n * size * std::log(prob) +
                n * mean * std::log1p(-prob);
    for (double k : counts) ll += std::lgamma(k + size);
    return ll;
  };
  constexpr double log_lo = -9.0;   // size ~ 1.2e-4
  constexpr double log_hi = 16.0;   // size ~ 8.9e6
  const auto [log_size, neg_ll] = boost::math::tools::brent_find_minima(
      [&](double t) { return -profile_ll(std::exp(t)); }, log_lo, log_hi, 40);
  if (log_hi - log_size < 1e-3 || log_size - log_lo < 1e-3) {
    fail(ErrorKind::nonconvergence,
         "negative-binomial size estimate ran to the search boundary (data not overdispersed)");
  }
  const double size = std::exp(log_size);
  const double prob = size / (size + mean);
  const boost::math::negative_binomial_distribution<double> dist(size, prob);
  auto discrete_cdf = [&](double k) { return k < 0.0 ? 0.0 : boost::math::cdf(dist, k); };

  FitReport r;
  r.family = Family::negative_binomial;
  r.param_names = {"size", "prob"};
  r.params = {size, prob};
  r.free_parameters = 2;
  r.sample_size = counts.size();
  r.log_likelihood = -neg_ll;
  r.notes.push_back("data rounded to nearest integer");
  r.notes.push_back("KS uses the discrete-CDF convention (approximate)");

  // Discrete KS: sup over integer support points spanning the observed range.
  double ks = 0.0;
  std::size_t idx = 0;
  for (double k = counts.front() - 1.0; k <= counts.back(); k += 1.0) {
    while (idx < counts.size() && counts[idx] <= k) ++idx;
    ks = std::max(ks, std::abs(static_cast<double>(idx) / n - discrete_cdf(k)));
  }
  r.ks_statistic = ks;
  // Raw value x rounds to k <= floor(x + 0.5).
  r.rmse = histogram_rmse(sorted, [&](double x) { return discrete_cdf(std::floor(x + 0.5)); });
  finish_metrics(r);
  return r;
}

}  // namespace

FitReport fit(Family family, std::span<const double> data, std::optional<Bounds> fixed_bounds) {
  if (data.empty()) fail(ErrorKind::empty_data, "cannot fit an empty data set");
  for (double x : data) {
    if (!std::isfinite(x)) fail(ErrorKind::invalid_argument, "data contains non-finite values");
  }
  std::vector<double> sorted(data.begin(), data.end());
  std::sort(sorted.begin(), sorted.end());
  switch (family) {
    case Family::truncated_normal: return fit_truncated_normal(sorted, fixed_bounds);
    case Family::pareto: return fit_pareto(sorted);
    case Family::negative_binomial: return fit_negative_binomial(sorted);
  }
  fail(ErrorKind::invalid_argument, "unknown family");
}

Comparison compare(std::span<const double> data, std::span<const Family> families,
                   std::optional<Bounds> fixed_bounds) {
  if (families.empty()) fail(ErrorKind::invalid_argument, "compare needs at least one family");
  Comparison out;
  for (Family f : families) {
    try {
      out.ranking.push_back(fit(f, data, fixed_bounds));
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::empty_data) throw;
      out.failures.push_back({f, e.kind(), e.what()});
    }
  }
  std::sort(out.ranking.begin(), out.ranking.end(), [](const FitReport& a, const FitReport& b) {
    if (a.aic != b.aic) return a.aic < b.aic;
    if (a.bic != b.bic) return a.bic < b.bic;
    return to_string(a.family) < to_string(b.family);
  });
  return out;
}

}  // namespace procure::fitkit
