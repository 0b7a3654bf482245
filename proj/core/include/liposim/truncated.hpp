#pragma once

#include <optional>
#include <string_view>

// Truncated distributions parameterised by the statistics they should
// reproduce *after* truncation (mean, sd, range), which is how measured
// size and count data are usually reported.
//
// Internally the range is mapped to t in [-1, 1] (linearly for the normal
// family, through log x for the lognormal family) and the fitted law has
// log-density theta1*t + theta2*t^2 with theta2 <= 0. theta2 < 0 is a
// truncated normal; theta2 == 0 is its truncated-exponential limit, which
// is where a wide, skewed target ends up.

#include <cstdint>

#include "liposim/random.hpp"

namespace liposim {

enum class DistributionFamily { Normal, Lognormal };

std::string_view to_string(DistributionFamily family);
std::optional<DistributionFamily> parse_distribution_family(std::string_view text);

struct TruncatedSpec {
  double mean = 0.0;
  double sd = 0.0;
  double low = 0.0;
  double high = 0.0;

  bool operator==(const TruncatedSpec&) const = default;
};

class TruncatedDistribution {
 public:
  // Matches spec.mean exactly and spec.sd as closely as the family can on
  // the given range. With integer_valued the variate is round(x) and the
  // fit targets the moments of the rounded values.
  // Throws InvalidArgument when low > high, sd < 0, or the mean lies
  // outside [low, high].
  static TruncatedDistribution fit(const TruncatedSpec& spec, DistributionFamily family,
                                   bool integer_valued = false);

  // Exact draw by rejection sampling.
  double sample(Rng& rng) const;

  // Moments of the fitted truncated law (computed by quadrature).
  double mean() const { return model_mean_; }
  double sd() const { return model_sd_; }

  double theta1() const { return theta1_; }
  double theta2() const { return theta2_; }
  bool degenerate() const { return degenerate_; }
  DistributionFamily family() const { return family_; }
  bool integer_valued() const { return integer_; }

  // Maps x to t and back; exposed for tests and diagnostics.
  double to_t(double x) const;
  double to_x(double t) const;

  // Range of the continuous variate before rounding.
  double support_low() const { return lo_; }
  double support_high() const { return hi_; }

 private:
  struct Moments {
    double mean;
    double sd;
  };

  TruncatedDistribution() = default;

  Moments moments(double theta1, double theta2) const;
  double solve_theta1(double theta2, double target_mean) const;
  void choose_proposal();
  double sample_t(Rng& rng) const;

  TruncatedSpec spec_{};
  DistributionFamily family_ = DistributionFamily::Normal;
  bool integer_ = false;
  bool degenerate_ = false;
  double point_ = 0.0;

  double lo_ = 0.0, hi_ = 0.0;        // continuous support in x
  double centre_ = 0.0, half_ = 1.0;  // x (or log x) = centre + half * t

  double theta1_ = 0.0, theta2_ = 0.0;
  double model_mean_ = 0.0, model_sd_ = 0.0;

  bool normal_proposal_ = false;
  double tangent_point_ = 0.0, tangent_slope_ = 0.0;
};

}  // namespace liposim
