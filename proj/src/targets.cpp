#include "thermolab/targets.hpp"

#include <cmath>

namespace thermolab::targets {

double delta(double lambda, int d) { return 2.0 / (lambda * d); }

double psi_autocov(double lambda, int d, double s) { return std::exp(-lambda * std::abs(s)) / d; }

double psi_second_moment(int d) { return 1.0 / d; }

double conditional_decay_factor(double lambda, double t) { return std::exp(-lambda * t); }

double v_corr(double lambda, int d, int k) {
  const double denom = lambda * lambda * d;
  if (k == 0) return 2.0 * (std::expm1(-lambda) + lambda) / denom;
  const double jump = std::expm1(lambda);
  return jump * jump * std::exp(-lambda * (std::abs(k) + 1)) / denom;
}

double sigma_tilde(double lambda, int d) { return 2.0 / (lambda * d); }

double e_tilde(double lambda, int d) { return -std::expm1(-lambda) / (lambda * lambda * d); }

double h_correction(double lambda, int d) {
  return (std::expm1(-lambda) + lambda) / (lambda * lambda * d);
}

double e_const(double lambda, int d) { return 1.0 / (lambda * d); }

double ou_stationary_variance() { return 1.0; }

double ou_autocorr(double s) { return std::exp(-0.5 * std::abs(s)); }

double sphere_second_moment(double total_energy, int n_particles, int d) {
  return total_energy / (n_particles * d);
}

double spiral_area_term(double epsilon) {
  const double e2 = epsilon * epsilon;
  return 0.5 + 0.25 * e2 * std::sin(2.0 / e2);
}

double spiral_antisymmetric(double epsilon) {
  const double e2 = epsilon * epsilon;
  return 1.0 - e2 * std::sin(1.0 / e2);
}

}  // namespace thermolab::targets
