#pragma once

// Closed-form reference values. Estimators compare against these and never
// inline the formulas themselves.

namespace thermolab::targets {

/// Noise strength of the limit SDEs, 2 / (lambda d).
double delta(double lambda, int d);

/// E[psi_i(0) psi_i(s)] = e^{-lambda |s|} / d.
double psi_autocov(double lambda, int d, double s);
/// E[psi_i^2] = 1 / d.
double psi_second_moment(int d);
/// E[psi(t) | psi(0) = a] = factor * a.
double conditional_decay_factor(double lambda, double t);

/// E[V_i V_i o F^k] for unit-window integrals V.
double v_corr(double lambda, int d, int k);

/// Green-Kubo constants (all multiples of the identity).
double sigma_tilde(double lambda, int d);
double e_tilde(double lambda, int d);
double h_correction(double lambda, int d);
double e_const(double lambda, int d);

/// OU dX = dB - X/2 dt.
double ou_stationary_variance();
double ou_autocorr(double s);

/// E[u_i u_j] under the uniform law on |u|^2 = U in R^{N d}, i = j.
double sphere_second_moment(double total_energy, int n_particles, int d);

/// Spiral example on [0, 1].
double spiral_area_term(double epsilon);      // y_2(1) with y(0) = x(0)
double spiral_antisymmetric(double epsilon);  // W_12(0,1) - W_21(0,1)

}  // namespace thermolab::targets
