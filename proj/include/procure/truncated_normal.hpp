#pragma once

#include <cstddef>
#include <vector>

#include "procure/random.hpp"

namespace procure {

/// Normal law N(mu, sigma^2) restricted to [lower, upper] and renormalized.
/// Immutable after construction; safe to share across threads.
class TruncatedNormal {
 public:
  /// Throws Error(invalid_distribution) unless sigma > 0, lower < upper and the
  /// normalizer exceeds 1e-12.
  TruncatedNormal(double mu, double sigma, double lower, double upper);

  double mu() const noexcept { return mu_; }
  double sigma() const noexcept { return sigma_; }
  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }

  /// Standardized bounds (a - mu)/sigma and (b - mu)/sigma.
  double lower_z() const noexcept { return lower_z_; }
  double upper_z() const noexcept { return upper_z_; }
  double normalizer() const noexcept { return normalizer_; }

  double pdf(double x) const noexcept;
  double cdf(double x) const noexcept;
  /// 1 - cdf(x), evaluated on the tail that avoids cancellation.
  double survival(double x) const noexcept;
  /// Inverse CDF. Throws Error(out_of_range) for u outside [0,1].
  double quantile(double u) const;

  double mean() const noexcept;
  double variance() const noexcept;

  /// E[(D - q)^+] in closed form.
  double expected_excess(double q) const noexcept;
  /// E[(q - D)^+] = q - mean + E[(D - q)^+].
  double expected_leftover(double q) const noexcept;

  /// Inverse-CDF draws; exactly one uniform consumed per value.
  std::vector<double> sample(RandomStream& rng, std::size_t n) const;

 private:
  double mu_;
  double sigma_;
  double lower_;
  double upper_;
  double lower_z_;
  double upper_z_;
  double normalizer_;
  // Lower-tail mass Phi(a*) and upper-tail mass 1 - Phi(b*).
  double lower_tail_;
  double upper_tail_;
  bool upper_region_;
};

}  // namespace procure
