#pragma once

#include <span>
#include <vector>

namespace dlog {

/// Parameters of the normalized delay logistic equation
///   x'(t) = r * x(t) * (1 + alpha * x(t) - x(t-1)),
/// with unit delay and dimensionless time. r > 0, alpha finite.
struct Params {
  double r;
  double alpha;

  Params(double r_, double alpha_);
};

/// Parameters of the raw (dimensional) equation
///   N'(s) = N(s) * (r_tilde + a * N(s) - b * N(s - tau)),
/// with r_tilde, b, tau > 0.
struct RawParams {
  double r_tilde;
  double a;
  double b;
  double tau;

  RawParams(double r_tilde_, double a_, double b_, double tau_);
};

/// One feedback term a_i * x(t - tau_i) of the multi-delay equation.
struct DelayTerm {
  double a;
  double tau;
};

/// Parameters of the multi-delay equation
///   x'(t) = r * x(t) * (1 + sum_i a_i * x(t - tau_i)).
/// Delays are distinct, sorted ascending, nonnegative, with max delay > 0;
/// a single tau = 0 term plays the role of instantaneous feedback.
struct GenParams {
  double r;
  std::vector<DelayTerm> terms;

  GenParams(double r_, std::vector<DelayTerm> terms_);

  double max_delay() const { return terms.back().tau; }
  /// Coefficient of the tau = 0 term, or 0 if there is none.
  double instantaneous_coeff() const;
};

/// The positive equilibrium 1/(1 - alpha); exists if and only if alpha < 1.
struct Equilibrium {
  bool exists;
  double value;  // meaningful only when exists
};

/// Result of mapping RawParams onto the normalized equation,
/// via x(t) = state_scale * N(time_scale * t).
struct Normalization {
  Params params;       // r = tau * r_tilde, alpha = a / b
  double state_scale;  // b / r_tilde
  double time_scale;   // tau
};

/// Right-hand side r * x_now * (1 + alpha * x_now - x_delayed).
double rhs(const Params& p, double x_now, double x_delayed);

/// Multi-delay right-hand side r * x_now * (1 + sum a_i * x_delayed[i]).
/// x_delayed must have one entry per term (a tau = 0 term expects x_now there).
double rhs_gen(const GenParams& p, double x_now, std::span<const double> x_delayed);

Equilibrium equilibrium(const Params& p);

/// Normalization of the raw equation: x(t) = state_scale * N(time_scale * t)
/// solves the normalized equation when N solves the raw one, with
/// state_scale = b / r_tilde and time_scale = tau.
Normalization normalize(const RawParams& raw);

}  // namespace dlog
