#include <cmath>
#include <limits>
#include <random>

#include "conlearn/errors.hpp"
#include "conlearn/experiments.hpp"

namespace conlearn {

BetaShapes beta_shapes_from_moments(double mean, double variance) {
  if (!(mean > 0.0 && mean < 1.0)) throw DomainError("beta mean must lie in (0, 1)");
  const double spread = mean * (1.0 - mean);
  if (!(variance > 0.0)) throw DomainError("beta variance must be positive");
  if (!(variance < spread))
    throw DomainError("infeasible beta moments: variance must be below mean(1-mean)=" +
                      std::to_string(spread));
  const double scale = spread / variance - 1.0;
  return {mean * scale, (1.0 - mean) * scale};
}

BetaSpec BetaSpec::from_moments(double mean, double variance) {
  BetaSpec spec;
  spec.mean = mean;
  spec.variance = variance;
  if (variance == 0.0) {
    if (!(mean >= 0.0 && mean <= 1.0)) throw DomainError("point-mass mean must lie in [0, 1]");
    spec.shape_a = spec.shape_b = std::numeric_limits<double>::infinity();
    return spec;
  }
  const BetaShapes s = beta_shapes_from_moments(mean, variance);
  spec.shape_a = s.a;
  spec.shape_b = s.b;
  return spec;
}

std::vector<double> sample_accuracies(const BetaSpec& spec, int n, Rng& rng) {
  if (n < 0) throw DomainError("sample size must be non-negative");
  std::vector<double> out(n, spec.mean);
  if (spec.point_mass()) return out;
  if (!(spec.shape_a > 0.0 && spec.shape_b > 0.0)) throw DomainError("beta shapes must be positive");
  std::gamma_distribution<double> ga(spec.shape_a, 1.0);
  std::gamma_distribution<double> gb(spec.shape_b, 1.0);
  const double lo = std::nextafter(0.0, 1.0);
  const double hi = std::nextafter(1.0, 0.0);
  for (double& x : out) {
    const double u = ga(rng);
    const double v = gb(rng);
    double z = u / (u + v);
    if (!(z > lo)) z = lo; // also catches 0/0
    if (z > hi) z = hi;
    x = z;
  }
  return out;
}

} // namespace conlearn
