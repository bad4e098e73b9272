#pragma once

#include <optional>
#include <ostream>
#include <span>
#include <string>

#include "dlog/params.hpp"

namespace dlog {

/// Critical delay rate r*(alpha) = sqrt((1-alpha)/(1+alpha)) * arccos(alpha):
/// the positive equilibrium is locally stable for r < r* and unstable
/// for r > r*. Domain (-1, 1); r* decreases from +inf to 0 across it.
double stability_boundary_r(double alpha);

/// Independent oracle for stability_boundary_r: locates the purely
/// imaginary root of the characteristic equation of the linearization
/// u'(t) = r x* (alpha u(t) - u(t-1)) by bisecting cos(omega) = alpha
/// on (0, pi) and solving the imaginary part r x* sin(omega) = omega
/// for r. Does not use the closed form.
double char_root_boundary(double alpha);

/// Rate of the exact exponential solution c e^{rt}: r = -ln(alpha),
/// defined for alpha in (0, 1).
double exp_solution_rate(double alpha);

/// Residual sum a_i e^{-r tau_i} of the exponential-solution condition
/// for the multi-delay equation, at the given rate.
double genlog_residual_at(std::span<const DelayTerm> terms, double r);
/// Same, evaluated at g.r.
double genlog_residual(const GenParams& g);

/// Root of the residual on [r_lo, r_hi] by safeguarded bracketing to
/// 1e-12, or nullopt when the residual does not change sign there.
std::optional<double> exp_solution_rate_gen(std::span<const DelayTerm> terms, double r_lo,
                                            double r_hi);

/// Stability boundary in the omega = arccos(alpha) parameterization:
/// omega (1 - cos omega) / sin omega, for omega in (0, pi/2).
double stability_boundary_omega(double omega);
/// Exponential-solution rate in the same parameterization:
/// -ln(cos omega), for omega in (0, pi/2).
double exp_solution_rate_omega(double omega);
/// True iff the exponential-solution rate exceeds the stability
/// boundary on a uniform open grid of n >= 1000 points of (0, pi/2);
/// i.e. the equilibrium is unstable whenever the exponential solution
/// exists.
bool check_exp_rate_above_boundary(int n);

/// Lower bound ln(1 + e^r/c)/r for the blow-up time of solutions
/// starting below the exponential envelope with x(0) = c.
double blowup_time_lower_bound(double r, double c);

/// Closed-form solution y(t) = c e^{rt} / (1 + (1 - e^{rt}) e^{-r} c)
/// of the comparison equation y' = r y (1 + e^{-r} y), y(0) = c.
/// Defined for t below the denominator root, which equals
/// blowup_time_lower_bound(r, c).
double comparison_ode_solution(double r, double c, double t);

enum class LocalStability { stable, unstable, boundary, not_applicable };

/// Everything the theory pins down about a parameter point.
/// globally_stable is asserted only for alpha <= -1; whether the
/// equilibrium is globally stable for -1 < alpha < 0 is open, so false
/// there means "not asserted". locally_stable is not_applicable when
/// no positive equilibrium exists (alpha >= 1).
struct RegionClass {
  bool equilibrium_exists;
  bool globally_stable;
  LocalStability locally_stable;
  bool bounded_all;
  bool blowup_exists;
  bool unbounded_limsup;
  std::optional<double> boundary_r;  // present iff -1 < alpha < 1
};

RegionClass classify(const Params& p);

const char* to_string(LocalStability s);

/// Single-line JSON rendering of a classification, echoing the inputs.
std::string region_class_json(const Params& p, const RegionClass& rc);

/// Stability-chart CSV: `alpha,r_boundary,exp_solution_r` on a uniform
/// grid of n points over [alpha_min, alpha_max] (endpoints included;
/// the range must lie inside (-1, 1)). exp_solution_r is empty for
/// alpha <= 0.
void write_stability_chart_csv(std::ostream& os, double alpha_min, double alpha_max, int n);

}  // namespace dlog
