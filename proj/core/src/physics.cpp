#include "teqkd/physics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace teqkd::physics {

namespace {

std::string at(std::string_view path, std::string_view field) {
  std::string s(path);
  if (!s.empty()) s += '.';
  s += field;
  return s;
}

bool finite_positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

void validate(const DetectorSpec& det, std::string_view path, Diagnostics& diag) {
  if (!finite_positive(det.bandwidth))
    diag.error(at(path, "bandwidth") + ": must be finite and > 0");
  if (!(det.efficiency >= 0.0 && det.efficiency <= 1.0))
    diag.error(at(path, "efficiency") + ": must lie in [0, 1]");
  if (!std::isfinite(det.center_frequency) || det.center_frequency < 0.0)
    diag.error(at(path, "center_frequency") + ": must be finite and >= 0");
}

void validate(const SourceSpec& src, std::string_view path, Diagnostics& diag) {
  if (!finite_positive(src.sum_frequency))
    diag.error(at(path, "sum_frequency") + ": must be finite and > 0");
  if (!(std::isfinite(src.emission_time_jitter) && src.emission_time_jitter >= 0.0))
    diag.error(at(path, "emission_time_jitter") + ": must be finite and >= 0");
  if (!finite_positive(src.spectral_width))
    diag.error(at(path, "spectral_width") + ": must be finite and > 0");
}

void check_spectral_coverage(const SourceSpec& src, const DetectorSpec& det,
                             std::string_view path, Diagnostics& diag) {
  if (det.bandwidth > src.spectral_width)
    diag.warn(at(path, "bandwidth") +
              ": exceeds source.spectral_width; the flat-spectrum assumption does not hold");
}

AngularFrequency detuning(const DetectorSpec& a, const DetectorSpec& b, const SourceSpec& src) {
  // Subtract in this order so that integer-valued frequencies near 1e15 stay exact.
  return (src.sum_frequency - a.center_frequency) - b.center_frequency;
}

double lorentzian(AngularFrequency detuning, AngularFrequency width) {
  const double w2 = width * width;
  return w2 / (detuning * detuning + w2);
}

double correlation_density(Seconds t, const DetectorSpec& a, const DetectorSpec& b,
                           const SourceSpec& src) {
  const double ga = a.bandwidth;
  const double gb = b.bandwidth;
  const double omega = detuning(a, b, src);
  const double pre = 2.0 * std::numbers::pi * ga * gb;
  const double shape = t >= 0.0 ? std::exp(-2.0 * gb * t) : std::exp(2.0 * ga * t);
  const double width = ga + gb;
  return pre * pre * shape / (omega * omega + width * width);
}

double coincidence_probability(const DetectorSpec& a, const DetectorSpec& b,
                               const SourceSpec& src) {
  return a.efficiency * b.efficiency * lorentzian(detuning(a, b, src), a.bandwidth + b.bandwidth);
}

DelayDistribution delay_distribution(const DetectorSpec& a, const DetectorSpec& b) {
  return DelayDistribution{
      .rate_positive = 2.0 * b.bandwidth,
      .rate_negative = 2.0 * a.bandwidth,
      .weight_positive = a.bandwidth / (a.bandwidth + b.bandwidth),
  };
}

Seconds DelayDistribution::mean() const {
  return weight_positive / rate_positive - weight_negative() / rate_negative;
}

double DelayDistribution::variance() const {
  const double m = mean();
  const double second = weight_positive * 2.0 / (rate_positive * rate_positive) +
                        weight_negative() * 2.0 / (rate_negative * rate_negative);
  return second - m * m;
}

double DelayDistribution::pdf(Seconds t) const {
  if (t >= 0.0) return weight_positive * rate_positive * std::exp(-rate_positive * t);
  return weight_negative() * rate_negative * std::exp(rate_negative * t);
}

double DelayDistribution::cdf(Seconds t) const {
  if (t < 0.0) return weight_negative() * std::exp(rate_negative * t);
  return weight_negative() + weight_positive * -std::expm1(-rate_positive * t);
}

Seconds DelayDistribution::quantile(double p) const {
  const double wn = weight_negative();
  if (p < wn) return std::log(p / wn) / rate_negative;
  return -std::log1p(-(p - wn) / weight_positive) / rate_positive;
}

Seconds DelayDistribution::abs_quantile(double p) const {
  auto abs_cdf = [&](double x) {
    return weight_positive * -std::expm1(-rate_positive * x) +
           weight_negative() * -std::expm1(-rate_negative * x);
  };
  double lo = 0.0;
  double hi = 1.0 / std::min(rate_positive, rate_negative);
  while (abs_cdf(hi) < p) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (abs_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Seconds sample_delay(const DelayDistribution& dist, RandomStream& rng) {
  const double u = rng.uniform_open();
  const double wn = dist.weight_negative();
  if (u < wn) return std::log(u / wn) / dist.rate_negative;
  // 1 - u > 0 because u < 1; clamp so T = 0 is the smallest positive-branch value.
  return -std::log(std::min(1.0, (1.0 - u) / dist.weight_positive)) / dist.rate_positive;
}

Seconds emission_delay(const SourceSpec& src, RandomStream& rng) {
  if (src.kind != SourceKind::dual_single_photon) return 0.0;
  const double u = rng.uniform_open();
  return src.emission_time_jitter > 0.0 ? -std::log(u) * src.emission_time_jitter : 0.0;
}

FireOutcome fire_outcome(const DetectorSpec& a, const DetectorSpec& b, const SourceSpec& src,
                         RandomStream& rng) {
  const bool fired = rng.uniform() < coincidence_probability(a, b, src);
  const Seconds t = sample_delay(delay_distribution(a, b), rng);
  const Seconds emit = emission_delay(src, rng);
  if (!fired) return std::nullopt;
  return Coincidence{t + emit};
}

}  // namespace teqkd::physics
