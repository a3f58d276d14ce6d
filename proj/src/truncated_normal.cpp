#include "procure/truncated_normal.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "procure/error.hpp"
#include "procure/normal.hpp"

namespace procure {

namespace {

// z * phi(z) with the infinite-bound limit taken as 0.
double z_pdf(double z) noexcept { return std::isinf(z) ? 0.0 : z * normal::pdf(z); }

double std_z(double x, double mu, double sigma) noexcept {
  if (std::isinf(x)) return x;
  return (x - mu) / sigma;
}

}  // namespace

TruncatedNormal::TruncatedNormal(double mu, double sigma, double lower, double upper)
    : mu_(mu), sigma_(sigma), lower_(lower), upper_(upper) {
  if (!std::isfinite(mu) || !(sigma > 0.0) || !std::isfinite(sigma)) {
    fail(ErrorKind::invalid_distribution,
         fmt::format("truncated normal needs finite mu and sigma > 0 (mu={}, sigma={})", mu, sigma));
  }
  if (std::isnan(lower) || std::isnan(upper) || !(lower < upper)) {
    fail(ErrorKind::invalid_distribution,
         fmt::format("truncated normal needs lower < upper (lower={}, upper={})", lower, upper));
  }
  lower_z_ = std_z(lower, mu, sigma);
  upper_z_ = std_z(upper, mu, sigma);
  lower_tail_ = normal::cdf(lower_z_);
  upper_tail_ = normal::survival(upper_z_);
  upper_region_ = lower_z_ > 0.0;
  normalizer_ = upper_region_ ? normal::survival(lower_z_) - upper_tail_
                              : normal::cdf(upper_z_) - lower_tail_;
  if (!(normalizer_ >= 1e-12)) {
    fail(ErrorKind::invalid_distribution,
         fmt::format("truncation [{}, {}] leaves normalizer {:.3g} < 1e-12", lower, upper,
                     normalizer_));
  }
}

double TruncatedNormal::pdf(double x) const noexcept {
  if (x < lower_ || x > upper_) return 0.0;
  return normal::pdf((x - mu_) / sigma_) / (sigma_ * normalizer_);
}

double TruncatedNormal::cdf(double x) const noexcept {
  if (x <= lower_) return 0.0;
  if (x >= upper_) return 1.0;
  const double z = (x - mu_) / sigma_;
  const double value = upper_region_ ? (normal::survival(lower_z_) - normal::survival(z))
                                     : (normal::cdf(z) - lower_tail_);
  return std::clamp(value / normalizer_, 0.0, 1.0);
}

double TruncatedNormal::survival(double x) const noexcept {
  if (x <= lower_) return 1.0;
  if (x >= upper_) return 0.0;
  const double z = (x - mu_) / sigma_;
  const double value = upper_region_ ? (normal::survival(z) - upper_tail_)
                                     : (normal::cdf(upper_z_) - normal::cdf(z));
  return std::clamp(value / normalizer_, 0.0, 1.0);
}

double TruncatedNormal::quantile(double u) const {
  if (!(u >= 0.0 && u <= 1.0)) {
    fail(ErrorKind::out_of_range, fmt::format("quantile level {} outside [0,1]", u));
  }
  if (u == 0.0) return lower_;
  if (u == 1.0) return upper_;
  double z;
  if (upper_region_) {
    // Work with the upper tail mass 1 - Phi(z).
    z = -normal::quantile(normal::survival(lower_z_) - u * normalizer_);
  } else {
    const double p = lower_tail_ + u * normalizer_;
    if (p <= 0.5) {
      z = normal::quantile(p);
    } else {
      z = -normal::quantile(upper_tail_ + (1.0 - u) * normalizer_);
    }
  }
  return std::clamp(mu_ + sigma_ * z, lower_, upper_);
}

double TruncatedNormal::mean() const noexcept {
  const double shift = (normal::pdf(lower_z_) - normal::pdf(upper_z_)) / normalizer_;
  return mu_ + sigma_ * shift;
}

double TruncatedNormal::variance() const noexcept {
  const double shift = (normal::pdf(lower_z_) - normal::pdf(upper_z_)) / normalizer_;
  const double tilt = (z_pdf(lower_z_) - z_pdf(upper_z_)) / normalizer_;
  return sigma_ * sigma_ * (1.0 + tilt - shift * shift);
}

double TruncatedNormal::expected_excess(double q) const noexcept {
  if (q <= lower_) return mean() - q;
  if (q >= upper_) return 0.0;
  const double z = (q - mu_) / sigma_;
  const double value =
      sigma_ * (normal::pdf(z) - normal::pdf(upper_z_)) / normalizer_ - (q - mu_) * survival(q);
  return std::max(value, 0.0);
}

double TruncatedNormal::expected_leftover(double q) const noexcept {
  if (q <= lower_) return 0.0;
  if (q >= upper_) return q - mean();
  return std::max(q - mean() + expected_excess(q), 0.0);
}

std::vector<double> TruncatedNormal::sample(RandomStream& rng, std::size_t n) const {
  std::vector<double> out(n);
  for (double& x : out) x = quantile(rng.uniform());
  return out;
}

}  // namespace procure
