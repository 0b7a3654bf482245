#include "liposim/truncated.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "liposim/error.hpp"

namespace liposim {

std::string_view to_string(DistributionFamily family) {
  return family == DistributionFamily::Lognormal ? "lognormal" : "normal";
}

std::optional<DistributionFamily> parse_distribution_family(std::string_view text) {
  if (text == "normal") return DistributionFamily::Normal;
  if (text == "lognormal") return DistributionFamily::Lognormal;
  return std::nullopt;
}

namespace {

constexpr int kPanels = 2048;        // Simpson panels over the active region
constexpr int kPanelsPerBin = 32;    // Simpson panels per integer bin
constexpr double kLogCutoff = 60.0;  // ignore mass below exp(-60) of the peak

double log_density(double t, double theta1, double theta2) { return theta1 * t + theta2 * t * t; }

// Point of [-1, 1] where the concave log-density peaks.
double peak(double theta1, double theta2) {
  if (theta2 < 0.0) return std::clamp(-theta1 / (2.0 * theta2), -1.0, 1.0);
  if (theta1 > 0.0) return 1.0;
  if (theta1 < 0.0) return -1.0;
  return 0.0;
}

// Sub-interval of [-1, 1] holding all but a negligible share of the mass.
std::pair<double, double> active_region(double theta1, double theta2) {
  const double tp = peak(theta1, theta2);
  const double top = log_density(tp, theta1, theta2);
  const double floor = top - kLogCutoff;
  double left = -1.0, right = 1.0;
  if (theta2 < 0.0) {
    // theta2 t^2 + theta1 t - floor = 0
    const double disc = theta1 * theta1 + 4.0 * theta2 * floor;
    if (disc > 0.0) {
      const double r = std::sqrt(disc);
      const double a = (-theta1 + r) / (2.0 * theta2);
      const double b = (-theta1 - r) / (2.0 * theta2);
      left = std::max(-1.0, std::min(a, b));
      right = std::min(1.0, std::max(a, b));
    }
  } else if (theta1 != 0.0) {
    const double width = kLogCutoff / std::abs(theta1);
    if (theta1 > 0.0) left = std::max(-1.0, 1.0 - width);
    else right = std::min(1.0, -1.0 + width);
  }
  if (!(left < right)) {
    left = std::max(-1.0, tp - 1e-9);
    right = std::min(1.0, tp + 1e-9);
  }
  return {left, right};
}

// Log of the integral of exp(slope * t) over [-1, 1].
double log_exp_integral(double slope) {
  if (std::abs(slope) < 1e-12) return std::log(2.0);
  const double a = std::abs(slope);
  return a + std::log(-std::expm1(-2.0 * a)) - std::log(a);
}

// Inverse-CDF draw from density proportional to exp(slope * t) on [-1, 1].
double sample_exponential_t(double slope, double u) {
  if (std::abs(slope) < 1e-12) return -1.0 + 2.0 * u;
  if (slope > 0.0) return std::clamp(1.0 + std::log(u + (1.0 - u) * std::exp(-2.0 * slope)) / slope, -1.0, 1.0);
  return std::clamp(-1.0 + std::log1p(u * std::expm1(2.0 * slope)) / slope, -1.0, 1.0);
}

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Illinois variant of regula falsi on a bracket with f(a), f(b) of opposite sign.
double illinois(const std::function<double(double)>& f, double a, double b, double fa, double fb,
                double xtol, int max_iter = 200) {
  int side = 0;
  for (int i = 0; i < max_iter; ++i) {
    double c = (a * fb - b * fa) / (fb - fa);
    if (!std::isfinite(c) || c <= std::min(a, b) || c >= std::max(a, b)) c = 0.5 * (a + b);
    const double fc = f(c);
    if (fc == 0.0 || std::abs(b - a) < xtol) return c;
    if ((fc > 0.0) == (fb > 0.0)) {
      b = c;
      fb = fc;
      if (side == -1) fa *= 0.5;
      side = -1;
    } else {
      a = c;
      fa = fc;
      if (side == 1) fb *= 0.5;
      side = 1;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

double TruncatedDistribution::to_t(double x) const {
  const double u = family_ == DistributionFamily::Lognormal ? std::log(x) : x;
  return (u - centre_) / half_;
}

double TruncatedDistribution::to_x(double t) const {
  const double u = centre_ + half_ * t;
  return family_ == DistributionFamily::Lognormal ? std::exp(u) : u;
}

TruncatedDistribution::Moments TruncatedDistribution::moments(double theta1, double theta2) const {
  const auto [left, right] = active_region(theta1, theta2);
  const double top = log_density(peak(theta1, theta2), theta1, theta2);

  // Accumulate (weight, value) pairs; weights are Simpson-weighted densities.
  std::vector<std::pair<double, double>> nodes;
  const auto simpson = [&](double a, double b, int panels, double value_override, bool use_override) {
    if (!(b > a)) return;
    const double h = (b - a) / panels;
    for (int i = 0; i <= panels; ++i) {
      const double t = a + h * i;
      const double coeff = (i == 0 || i == panels) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
      const double w = coeff * h / 3.0 * std::exp(log_density(t, theta1, theta2) - top);
      nodes.emplace_back(w, use_override ? value_override : to_x(t));
    }
  };

  if (integer_) {
    const auto first = static_cast<long long>(std::llround(spec_.low));
    const auto last = static_cast<long long>(std::llround(spec_.high));
    for (long long k = first; k <= last; ++k) {
      const double a = std::max(left, to_t(static_cast<double>(k) - 0.5));
      const double b = std::min(right, to_t(static_cast<double>(k) + 0.5));
      simpson(a, b, kPanelsPerBin, static_cast<double>(k), true);
    }
  } else {
    simpson(left, right, kPanels, 0.0, false);
  }

  double z = 0.0, m = 0.0;
  for (const auto& [w, x] : nodes) {
    z += w;
    m += w * x;
  }
  if (!(z > 0.0)) return {to_x(peak(theta1, theta2)), 0.0};
  m /= z;
  double v = 0.0;
  for (const auto& [w, x] : nodes) v += w * (x - m) * (x - m);
  return {m, std::sqrt(std::max(0.0, v / z))};
}

double TruncatedDistribution::solve_theta1(double theta2, double target_mean) const {
  const auto f = [&](double theta1) { return moments(theta1, theta2).mean - target_mean; };
  double bound = 2.0 * std::abs(theta2) + 64.0;
  double fa = f(-bound), fb = f(bound);
  while ((fa > 0.0) == (fb > 0.0) && bound < 1e9) {
    bound *= 4.0;
    fa = f(-bound);
    fb = f(bound);
  }
  if ((fa > 0.0) == (fb > 0.0)) return fa > 0.0 ? -bound : bound;
  return illinois(f, -bound, bound, fa, fb, 1e-12 * std::max(1.0, bound));
}

TruncatedDistribution TruncatedDistribution::fit(const TruncatedSpec& spec, DistributionFamily family,
                                                 bool integer_valued) {
  const auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(spec.mean) || !finite(spec.sd) || !finite(spec.low) || !finite(spec.high)) {
    throw InvalidArgument("truncated distribution parameters must be finite");
  }
  if (spec.low > spec.high) throw InvalidArgument("truncation range needs low <= high");
  if (spec.sd < 0.0) throw InvalidArgument("standard deviation must be >= 0");
  if (spec.mean < spec.low || spec.mean > spec.high) {
    throw InvalidArgument("truncation range must contain the mean");
  }

  TruncatedDistribution d;
  d.spec_ = spec;
  d.family_ = family;
  d.integer_ = integer_valued;
  d.lo_ = integer_valued ? spec.low - 0.5 : spec.low;
  d.hi_ = integer_valued ? spec.high + 0.5 : spec.high;
  if (family == DistributionFamily::Lognormal && !(d.lo_ > 0.0)) {
    throw InvalidArgument("lognormal family needs a positive support");
  }

  const double range = spec.high - spec.low;
  if (spec.sd == 0.0 || range == 0.0 || spec.mean == spec.low || spec.mean == spec.high) {
    d.degenerate_ = true;
    d.point_ = integer_valued ? std::round(spec.mean) : spec.mean;
    d.model_mean_ = d.point_;
    d.model_sd_ = 0.0;
    return d;
  }

  if (family == DistributionFamily::Lognormal) {
    d.centre_ = 0.5 * (std::log(d.lo_) + std::log(d.hi_));
    d.half_ = 0.5 * (std::log(d.hi_) - std::log(d.lo_));
  } else {
    d.centre_ = 0.5 * (d.lo_ + d.hi_);
    d.half_ = 0.5 * (d.hi_ - d.lo_);
  }

  // Target moments far from both bounds need no numerical fit.
  bool closed_form = false;
  if (!integer_valued) {
    if (family == DistributionFamily::Normal && spec.mean - 8.0 * spec.sd >= spec.low &&
        spec.mean + 8.0 * spec.sd <= spec.high) {
      const double s = spec.sd / d.half_;
      d.theta2_ = -1.0 / (2.0 * s * s);
      d.theta1_ = (spec.mean - d.centre_) / d.half_ / (s * s);
      closed_form = true;
    } else if (family == DistributionFamily::Lognormal) {
      const double s2 = std::log1p(spec.sd * spec.sd / (spec.mean * spec.mean));
      const double m = std::log(spec.mean) - 0.5 * s2;
      const double s = std::sqrt(s2);
      if (m - 8.0 * s >= std::log(spec.low) && m + 8.0 * s <= std::log(spec.high)) {
        const double st = s / d.half_;
        d.theta2_ = -1.0 / (2.0 * st * st);
        d.theta1_ = (m - d.centre_) / d.half_ / (st * st);
        closed_form = true;
      }
    }
  }

  if (!closed_form) {
    // sd at fixed mean shrinks as theta2 grows more negative. Solve for
    // x = log(-theta2); the exponential limit theta2 = 0 caps the sd.
    const auto sd_at = [&](double theta2) {
      const double t1 = d.solve_theta1(theta2, spec.mean);
      return std::pair{t1, d.moments(t1, theta2).sd};
    };
    const auto [t1_flat, sd_flat] = sd_at(0.0);
    if (spec.sd >= sd_flat) {
      d.theta1_ = t1_flat;
      d.theta2_ = 0.0;
    } else {
      const double sd_t = spec.sd / (family == DistributionFamily::Normal ? d.half_ : spec.mean * d.half_);
      double hi = std::log(std::max(1e-6, 1.0 / (2.0 * sd_t * sd_t)));
      double f_hi = sd_at(-std::exp(hi)).second - spec.sd;
      for (int i = 0; i < 60 && f_hi > 0.0; ++i) {
        hi += 2.0;
        f_hi = sd_at(-std::exp(hi)).second - spec.sd;
      }
      double lo = -30.0;
      const double f_lo = sd_at(-std::exp(lo)).second - spec.sd;
      double x = hi;
      if (f_hi <= 0.0 && f_lo >= 0.0) {
        x = illinois([&](double v) { return sd_at(-std::exp(v)).second - spec.sd; }, lo, hi, f_lo, f_hi,
                     1e-10);
      }
      d.theta2_ = -std::exp(x);
      d.theta1_ = d.solve_theta1(d.theta2_, spec.mean);
    }
  }

  const Moments mom = d.moments(d.theta1_, d.theta2_);
  d.model_mean_ = mom.mean;
  d.model_sd_ = mom.sd;
  d.choose_proposal();
  return d;
}

void TruncatedDistribution::choose_proposal() {
  // Normalising constant of the target on [-1, 1], in log space.
  const auto [left, right] = active_region(theta1_, theta2_);
  const double top = log_density(peak(theta1_, theta2_), theta1_, theta2_);
  double z = 0.0;
  const double h = (right - left) / kPanels;
  for (int i = 0; i <= kPanels; ++i) {
    const double t = left + h * i;
    const double coeff = (i == 0 || i == kPanels) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    z += coeff * h / 3.0 * std::exp(log_density(t, theta1_, theta2_) - top);
  }
  const double log_z = std::log(z) + top;

  // Tangent of the concave log-density at its peak bounds it from above.
  tangent_point_ = peak(theta1_, theta2_);
  tangent_slope_ = theta1_ + 2.0 * theta2_ * tangent_point_;
  if (tangent_point_ > -1.0 && tangent_point_ < 1.0) tangent_slope_ = 0.0;
  const double tangent_offset = top - tangent_slope_ * tangent_point_;
  const double tangent_accept = std::exp(log_z - (tangent_offset + log_exp_integral(tangent_slope_)));

  double normal_accept = 0.0;
  if (theta2_ < 0.0) {
    const double m = -theta1_ / (2.0 * theta2_);
    const double s = 1.0 / std::sqrt(-2.0 * theta2_);
    normal_accept = std_normal_cdf((1.0 - m) / s) - std_normal_cdf((-1.0 - m) / s);
  }
  normal_proposal_ = normal_accept > tangent_accept;
}

double TruncatedDistribution::sample_t(Rng& rng) const {
  if (normal_proposal_) {
    const double m = -theta1_ / (2.0 * theta2_);
    const double s = 1.0 / std::sqrt(-2.0 * theta2_);
    for (;;) {
      const double t = m + s * standard_normal(rng);
      if (t >= -1.0 && t <= 1.0) return t;
    }
  }
  const double offset = log_density(tangent_point_, theta1_, theta2_) - tangent_slope_ * tangent_point_;
  for (;;) {
    const double t = sample_exponential_t(tangent_slope_, uniform01(rng));
    const double log_accept = log_density(t, theta1_, theta2_) - (offset + tangent_slope_ * t);
    if (log_accept >= 0.0 || uniform01(rng) < std::exp(log_accept)) return t;
  }
}

double TruncatedDistribution::sample(Rng& rng) const {
  if (degenerate_) return point_;
  const double x = std::clamp(to_x(sample_t(rng)), lo_, hi_);
  if (!integer_) return x;
  return std::clamp(std::round(x), spec_.low, spec_.high);
}

}  // namespace liposim
