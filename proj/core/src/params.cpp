#include "dlog/params.hpp"

#include <cmath>
#include <stdexcept>

namespace dlog {

namespace {

void require(bool cond, const char* what) {
  if (!cond) throw std::invalid_argument(what);
}

}  // namespace

Params::Params(double r_, double alpha_) : r(r_), alpha(alpha_) {
  require(std::isfinite(r) && r > 0.0, "Params: r must be positive and finite");
  require(std::isfinite(alpha), "Params: alpha must be finite");
}

RawParams::RawParams(double r_tilde_, double a_, double b_, double tau_)
    : r_tilde(r_tilde_), a(a_), b(b_), tau(tau_) {
  require(std::isfinite(r_tilde) && r_tilde > 0.0, "RawParams: r_tilde must be positive");
  require(std::isfinite(a), "RawParams: a must be finite");
  require(std::isfinite(b) && b > 0.0, "RawParams: b must be positive");
  require(std::isfinite(tau) && tau > 0.0, "RawParams: tau must be positive");
}

GenParams::GenParams(double r_, std::vector<DelayTerm> terms_)
    : r(r_), terms(std::move(terms_)) {
  require(std::isfinite(r) && r > 0.0, "GenParams: r must be positive and finite");
  require(!terms.empty(), "GenParams: at least one term required");
  for (std::size_t i = 0; i < terms.size(); ++i) {
    require(std::isfinite(terms[i].a), "GenParams: coefficient must be finite");
    require(std::isfinite(terms[i].tau) && terms[i].tau >= 0.0,
            "GenParams: delays must be nonnegative");
    if (i > 0) {
      require(terms[i].tau > terms[i - 1].tau,
              "GenParams: delays must be distinct and sorted ascending");
    }
  }
  require(terms.back().tau > 0.0, "GenParams: max delay must be positive");
}

double GenParams::instantaneous_coeff() const {
  return terms.front().tau == 0.0 ? terms.front().a : 0.0;
}

double rhs(const Params& p, double x_now, double x_delayed) {
  return p.r * x_now * (1.0 + p.alpha * x_now - x_delayed);
}

double rhs_gen(const GenParams& p, double x_now, std::span<const double> x_delayed) {
  if (x_delayed.size() != p.terms.size()) {
    throw std::invalid_argument("rhs_gen: x_delayed size must match number of terms");
  }
  double feedback = 1.0;
  for (std::size_t i = 0; i < p.terms.size(); ++i) {
    feedback += p.terms[i].a * x_delayed[i];
  }
  return p.r * x_now * feedback;
}

Equilibrium equilibrium(const Params& p) {
  if (p.alpha >= 1.0) return {false, 0.0};
  return {true, 1.0 / (1.0 - p.alpha)};
}

Normalization normalize(const RawParams& raw) {
  return Normalization{
      Params(raw.tau * raw.r_tilde, raw.a / raw.b),
      raw.b / raw.r_tilde,
      raw.tau,
  };
}

}  // namespace dlog
