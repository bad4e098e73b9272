#include "dlog/analysis.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "dlog/rootfind.hpp"

namespace dlog {

namespace {

constexpr double kBoundaryTieTol = 1e-12;

void require_open_unit(double alpha) {
  if (!(alpha > -1.0 && alpha < 1.0)) {
    throw std::domain_error("stability boundary: alpha must lie in (-1, 1)");
  }
}

}  // namespace

double stability_boundary_r(double alpha) {
  require_open_unit(alpha);
  return std::sqrt((1.0 - alpha) / (1.0 + alpha)) * std::acos(alpha);
}

double char_root_boundary(double alpha) {
  require_open_unit(alpha);
  // Hopf root lambda = i omega of lambda = r x* (alpha - e^{-lambda}):
  // real part gives cos(omega) = alpha, imaginary part gives
  // r x* sin(omega) = omega. Bisection, not acos, for independence.
  const auto real_part = [alpha](double om) { return std::cos(om) - alpha; };
  const RootResult om_root =
      bisect(real_part, 1e-9, std::numbers::pi - 1e-9, 1e-13, 300);
  const double omega = om_root.root;
  if (std::abs(real_part(omega)) > 1e-10) {
    throw std::runtime_error("char_root_boundary: bisection failed to converge");
  }
  const double x_star = 1.0 / (1.0 - alpha);
  return omega / (x_star * std::sin(omega));
}

double exp_solution_rate(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::domain_error("exp_solution_rate: alpha must lie in (0, 1)");
  }
  return -std::log(alpha);
}

double genlog_residual_at(std::span<const DelayTerm> terms, double r) {
  double sum = 0.0;
  for (const auto& term : terms) sum += term.a * std::exp(-r * term.tau);
  return sum;
}

double genlog_residual(const GenParams& g) { return genlog_residual_at(g.terms, g.r); }

std::optional<double> exp_solution_rate_gen(std::span<const DelayTerm> terms, double r_lo,
                                            double r_hi) {
  if (!(r_lo > 0.0 && r_hi > r_lo)) {
    throw std::domain_error("exp_solution_rate_gen: need 0 < r_lo < r_hi");
  }
  const auto f = [terms](double r) { return genlog_residual_at(terms, r); };
  const double f_lo = f(r_lo);
  const double f_hi = f(r_hi);
  if (f_lo != 0.0 && f_hi != 0.0 && std::signbit(f_lo) == std::signbit(f_hi)) {
    return std::nullopt;
  }
  return brent(f, r_lo, r_hi, 1e-12, 300).root;
}

double stability_boundary_omega(double omega) {
  if (!(omega > 0.0 && omega < 0.5 * std::numbers::pi)) {
    throw std::domain_error("stability_boundary_omega: omega must lie in (0, pi/2)");
  }
  return omega * (1.0 - std::cos(omega)) / std::sin(omega);
}

double exp_solution_rate_omega(double omega) {
  if (!(omega > 0.0 && omega < 0.5 * std::numbers::pi)) {
    throw std::domain_error("exp_solution_rate_omega: omega must lie in (0, pi/2)");
  }
  return -std::log(std::cos(omega));
}

bool check_exp_rate_above_boundary(int n) {
  if (n < 1000) throw std::invalid_argument("check_exp_rate_above_boundary: n must be >= 1000");
  const double step = 0.5 * std::numbers::pi / (n + 1);
  for (int j = 1; j <= n; ++j) {
    const double omega = j * step;
    if (!(exp_solution_rate_omega(omega) > stability_boundary_omega(omega))) return false;
  }
  return true;
}

double blowup_time_lower_bound(double r, double c) {
  if (!(r > 0.0 && c > 0.0)) {
    throw std::domain_error("blowup_time_lower_bound: r and c must be positive");
  }
  return std::log1p(std::exp(r) / c) / r;
}

double comparison_ode_solution(double r, double c, double t) {
  if (!(r > 0.0 && c > 0.0)) {
    throw std::domain_error("comparison_ode_solution: r and c must be positive");
  }
  if (!(t < blowup_time_lower_bound(r, c))) {
    throw std::domain_error("comparison_ode_solution: t at or beyond the blow-up time");
  }
  const double ert = std::exp(r * t);
  return c * ert / (1.0 + (1.0 - ert) * std::exp(-r) * c);
}

RegionClass classify(const Params& p) {
  RegionClass rc;
  rc.equilibrium_exists = p.alpha < 1.0;
  rc.globally_stable = p.alpha <= -1.0;
  rc.bounded_all = p.alpha <= 0.0;
  rc.blowup_exists = p.alpha > 0.0;
  rc.unbounded_limsup = p.alpha >= 1.0;
  if (p.alpha > -1.0 && p.alpha < 1.0) {
    const double r_star = stability_boundary_r(p.alpha);
    rc.boundary_r = r_star;
    if (std::abs(p.r - r_star) <= kBoundaryTieTol) {
      rc.locally_stable = LocalStability::boundary;
    } else {
      rc.locally_stable = p.r < r_star ? LocalStability::stable : LocalStability::unstable;
    }
  } else if (p.alpha <= -1.0) {
    rc.boundary_r = std::nullopt;
    rc.locally_stable = LocalStability::stable;  // globally stable here
  } else {
    rc.boundary_r = std::nullopt;
    rc.locally_stable = LocalStability::not_applicable;  // no positive equilibrium
  }
  return rc;
}

const char* to_string(LocalStability s) {
  switch (s) {
    case LocalStability::stable: return "stable";
    case LocalStability::unstable: return "unstable";
    case LocalStability::boundary: return "boundary";
    case LocalStability::not_applicable: return "not_applicable";
  }
  return "?";
}

std::string region_class_json(const Params& p, const RegionClass& rc) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "{\"alpha\":" << p.alpha << ",\"r\":" << p.r
     << ",\"equilibrium_exists\":" << (rc.equilibrium_exists ? "true" : "false")
     << ",\"globally_stable\":" << (rc.globally_stable ? "true" : "false")
     << ",\"locally_stable\":\"" << to_string(rc.locally_stable) << "\""
     << ",\"bounded_all\":" << (rc.bounded_all ? "true" : "false")
     << ",\"blowup_exists\":" << (rc.blowup_exists ? "true" : "false")
     << ",\"unbounded_limsup\":" << (rc.unbounded_limsup ? "true" : "false")
     << ",\"boundary_r\":";
  if (rc.boundary_r) {
    os << *rc.boundary_r;
  } else {
    os << "null";
  }
  os << "}";
  return os.str();
}

void write_stability_chart_csv(std::ostream& os, double alpha_min, double alpha_max, int n) {
  if (!(alpha_min > -1.0 && alpha_max < 1.0 && alpha_min <= alpha_max)) {
    throw std::domain_error("stability chart: alpha range must lie inside (-1, 1)");
  }
  if (n < 1) throw std::invalid_argument("stability chart: n must be >= 1");
  os << "alpha,r_boundary,exp_solution_r\n";
  os << std::setprecision(17);
  for (int j = 0; j < n; ++j) {
    const double alpha =
        n == 1 ? alpha_min : alpha_min + (alpha_max - alpha_min) * j / static_cast<double>(n - 1);
    os << alpha << ',' << stability_boundary_r(alpha) << ',';
    if (alpha > 0.0) os << exp_solution_rate(alpha);
    os << '\n';
  }
}

}  // namespace dlog
