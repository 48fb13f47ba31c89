#pragma once

// Independent reference computations for tests. Nothing here calls into the
// library; each helper rebuilds its quantity from first principles.

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace teqkd::oracle {

/// Composite Simpson rule on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

/// T-dependent factor of the biphoton correlation function, written out directly.
inline double delay_shape(double t, double gamma_a, double gamma_b) {
  return t >= 0 ? std::exp(-2.0 * gamma_b * t) : std::exp(2.0 * gamma_a * t);
}

/// Integral of delay_shape over T >= 0 and T < 0 by quadrature, on a window
/// of 40 e-folds each side.
struct SideMasses {
  double positive;
  double negative;
};
inline SideMasses delay_side_masses(double gamma_a, double gamma_b) {
  const double pos = simpson([&](double t) { return delay_shape(t, gamma_a, gamma_b); }, 0.0,
                             20.0 / gamma_b);
  const double neg = simpson([&](double t) { return delay_shape(t, gamma_a, gamma_b); },
                             -20.0 / gamma_a, 0.0);
  return {pos, neg};
}

/// Mean of T under the normalized shape, by quadrature.
inline double delay_mean_by_quadrature(double gamma_a, double gamma_b) {
  const auto m = delay_side_masses(gamma_a, gamma_b);
  const double pos = simpson([&](double t) { return t * delay_shape(t, gamma_a, gamma_b); }, 0.0,
                             20.0 / gamma_b);
  const double neg = simpson([&](double t) { return t * delay_shape(t, gamma_a, gamma_b); },
                             -20.0 / gamma_a, 0.0);
  return (pos + neg) / (m.positive + m.negative);
}

/// Samples T by composition (pick a side, then a std::exponential_distribution
/// draw) rather than by the library's inverse transform.
inline std::vector<double> composition_samples(double gamma_a, double gamma_b, std::size_t n,
                                               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution positive(gamma_a / (gamma_a + gamma_b));
  std::exponential_distribution<double> pos_side(2.0 * gamma_b);
  std::exponential_distribution<double> neg_side(2.0 * gamma_a);
  std::vector<double> out(n);
  for (auto& t : out) t = positive(rng) ? pos_side(rng) : -neg_side(rng);
  return out;
}

/// Normalized Lorentzian line shape.
inline double lorentz(double detuning, double width) {
  return width * width / (detuning * detuning + width * width);
}

struct MeanSe {
  double mean;
  double se;
};

inline MeanSe mean_and_se(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  const double n = static_cast<double>(xs.size());
  const double m = s / n;
  double v = 0.0;
  for (double x : xs) v += (x - m) * (x - m);
  v /= (n - 1.0);
  return {m, std::sqrt(v / n)};
}

/// Chi-square critical value for 2 degrees of freedom at level alpha.
inline double chi2_critical_2dof(double alpha) { return -2.0 * std::log(alpha); }

}  // namespace teqkd::oracle
