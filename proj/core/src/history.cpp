#include "dlog/history.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace dlog {

namespace {

constexpr double kPositivityGridSpacing = 1e-3;

void require(bool cond, const char* what) {
  if (!cond) throw std::invalid_argument(what);
}

// Fritsch-Carlson monotone-preserving slopes for cubic Hermite
// interpolation; keeps the interpolant within the range of adjacent
// knot values, so positive samples give a positive interpolant.
std::vector<double> pchip_slopes(const std::vector<double>& s, const std::vector<double>& v) {
  const std::size_t n = s.size();
  std::vector<double> d(n, 0.0);
  if (n == 2) {
    d[0] = d[1] = (v[1] - v[0]) / (s[1] - s[0]);
    return d;
  }
  std::vector<double> h(n - 1), delta(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = s[i + 1] - s[i];
    delta[i] = (v[i + 1] - v[i]) / h[i];
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) {
      d[i] = 0.0;
    } else {
      const double w1 = 2.0 * h[i] + h[i - 1];
      const double w2 = h[i] + 2.0 * h[i - 1];
      d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
  }
  auto endpoint = [](double h0, double h1, double d0, double d1) {
    double slope = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (slope * d0 <= 0.0) {
      slope = 0.0;
    } else if (d0 * d1 < 0.0 && std::abs(slope) > 3.0 * std::abs(d0)) {
      slope = 3.0 * d0;
    }
    return slope;
  };
  d[0] = endpoint(h[0], h[1], delta[0], delta[1]);
  d[n - 1] = endpoint(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
  return d;
}

double hermite(double t, double x0, double x1, double v0, double v1, double d0, double d1) {
  const double h = x1 - x0;
  const double u = (t - x0) / h;
  const double u2 = u * u;
  const double u3 = u2 * u;
  return v0 * (2.0 * u3 - 3.0 * u2 + 1.0) + h * d0 * (u3 - 2.0 * u2 + u) +
         v1 * (-2.0 * u3 + 3.0 * u2) + h * d1 * (u3 - u2);
}

}  // namespace

double ExpProfileSpec::operator()(double s) const {
  double value = 0.0;
  for (std::size_t j = poly.size(); j-- > 0;) {
    value = value * s + poly[j];
  }
  if (sine_amp != 0.0) {
    value += sine_amp * std::sin(2.0 * std::numbers::pi * sine_k * s);
  }
  return value;
}

double HistoryFn::eval_unchecked(double s) const {
  switch (kind_) {
    case Kind::constant:
      return const_value_;
    case Kind::step_ramp:
      if (s <= plateau_end_) return plateau_value_;
      return plateau_value_ + (terminal_value_ - plateau_value_) * (s - plateau_end_) / (0.0 - plateau_end_);
    case Kind::exp_profile:
      return env_c_ * std::exp(env_r_ * s + psi_(s));
    case Kind::tabulated: {
      const auto it = std::upper_bound(tab_s_.begin(), tab_s_.end(), s);
      std::size_t i = it == tab_s_.begin() ? 0 : static_cast<std::size_t>(it - tab_s_.begin()) - 1;
      if (i + 1 >= tab_s_.size()) i = tab_s_.size() - 2;
      return hermite(s, tab_s_[i], tab_s_[i + 1], tab_v_[i], tab_v_[i + 1], tab_d_[i], tab_d_[i + 1]);
    }
  }
  return 0.0;  // unreachable
}

double HistoryFn::operator()(double s) const {
  if (!(s >= domain_start_ && s <= 0.0)) {
    throw std::domain_error("HistoryFn: argument outside [domain_start, 0]");
  }
  return eval_unchecked(s);
}

void HistoryFn::check_positive() const {
  double lowest = std::numeric_limits<double>::infinity();
  double s = domain_start_;
  while (true) {
    lowest = std::min(lowest, eval_unchecked(s));
    if (s >= 0.0) break;
    s = std::min(s + kPositivityGridSpacing, 0.0);
  }
  if (kind_ == Kind::tabulated) {
    for (double v : tab_v_) lowest = std::min(lowest, v);
  }
  if (!(lowest > 0.0) || !std::isfinite(lowest)) {
    throw std::invalid_argument("HistoryFn: history must be strictly positive on its domain");
  }
}

HistoryFn HistoryFn::constant(double value, double domain_start) {
  require(std::isfinite(value), "HistoryFn::constant: value must be finite");
  require(domain_start < 0.0, "HistoryFn::constant: domain_start must be negative");
  HistoryFn h;
  h.kind_ = Kind::constant;
  h.domain_start_ = domain_start;
  h.const_value_ = value;
  h.check_positive();
  return h;
}

HistoryFn HistoryFn::step_ramp(double plateau_value, double plateau_end, double terminal_value) {
  require(std::isfinite(plateau_value) && std::isfinite(terminal_value),
          "HistoryFn::step_ramp: values must be finite");
  require(plateau_end > -1.0 && plateau_end < 0.0,
          "HistoryFn::step_ramp: plateau_end must lie in (-1, 0)");
  HistoryFn h;
  h.kind_ = Kind::step_ramp;
  h.domain_start_ = -1.0;
  h.plateau_value_ = plateau_value;
  h.plateau_end_ = plateau_end;
  h.terminal_value_ = terminal_value;
  h.check_positive();
  return h;
}

HistoryFn HistoryFn::exp_profile(double c, double r, ExpProfileSpec psi, double domain_start) {
  require(std::isfinite(c) && c > 0.0, "HistoryFn::exp_profile: c must be positive");
  require(std::isfinite(r), "HistoryFn::exp_profile: r must be finite");
  require(domain_start < 0.0, "HistoryFn::exp_profile: domain_start must be negative");
  HistoryFn h;
  h.kind_ = Kind::exp_profile;
  h.domain_start_ = domain_start;
  h.env_c_ = c;
  h.env_r_ = r;
  h.psi_ = std::move(psi);
  h.check_positive();
  return h;
}

HistoryFn HistoryFn::tabulated(std::vector<double> s, std::vector<double> phi) {
  require(s.size() == phi.size(), "HistoryFn::tabulated: size mismatch");
  require(s.size() >= 2, "HistoryFn::tabulated: need at least two samples");
  for (std::size_t i = 0; i < s.size(); ++i) {
    require(std::isfinite(s[i]) && std::isfinite(phi[i]),
            "HistoryFn::tabulated: samples must be finite");
    if (i > 0) require(s[i] > s[i - 1], "HistoryFn::tabulated: abscissae must be strictly ascending");
  }
  require(s.back() == 0.0, "HistoryFn::tabulated: last abscissa must be 0");
  require(s.front() < 0.0, "HistoryFn::tabulated: first abscissa must be negative");
  HistoryFn h;
  h.kind_ = Kind::tabulated;
  h.domain_start_ = s.front();
  h.tab_d_ = pchip_slopes(s, phi);
  h.tab_s_ = std::move(s);
  h.tab_v_ = std::move(phi);
  h.check_positive();
  return h;
}

std::optional<double> HistoryFn::exp_reference_c() const {
  if (kind_ == Kind::exp_profile) return env_c_;
  return std::nullopt;
}

std::optional<double> HistoryFn::exp_reference_r() const {
  if (kind_ == Kind::exp_profile) return env_r_;
  return std::nullopt;
}

HistoryFn make_blowup_seed(const Params& p, double h_param) {
  if (!(p.alpha > 0.0)) {
    throw std::invalid_argument("make_blowup_seed: requires alpha > 0 (positive instantaneous feedback)");
  }
  if (!(h_param >= 2.0)) {
    throw std::invalid_argument("make_blowup_seed: requires h >= 2");
  }
  const double q = h_param / (p.r * p.alpha);
  return HistoryFn::step_ramp(1.0, -0.5, q);
}

HistoryFn make_below_exponential_history(double c, double r, double delta) {
  require(c > 0.0 && r > 0.0 && delta > 0.0,
          "make_below_exponential_history: c, r, delta must be positive");
  return HistoryFn::exp_profile(c, r, ExpProfileSpec{{0.0, 0.0, -delta}, 0.0, 0});
}

HistoryFn make_above_exponential_history(double c, double r, double delta) {
  require(c > 0.0 && r > 0.0 && delta > 0.0,
          "make_above_exponential_history: c, r, delta must be positive");
  return HistoryFn::exp_profile(c, r, ExpProfileSpec{{0.0, 0.0, delta}, 0.0, 0});
}

OrderCertificate certify_order(const HistoryFn& h, const Params& p, double c, int grid_n) {
  require(grid_n >= 100, "certify_order: grid_n must be at least 100");
  require(c > 0.0, "certify_order: c must be positive");
  const double spacing = 1.0 / grid_n;
  OrderCertificate cert{OrderRelation::neither, c, spacing};

  // the theorems pin phi(0) = c exactly
  if (std::abs(h(0.0) - c) > 1e-12) return cert;

  bool below = true, above = true;
  for (int j = 0; j <= grid_n; ++j) {
    const double s = (j == grid_n) ? 0.0 : -1.0 + static_cast<double>(j) * spacing;
    const double phi = h(s);
    const double envelope = c * std::exp(p.r * s);
    if (phi > envelope) below = false;
    if (phi < envelope) above = false;
  }
  const double end_gap = h(-1.0) - c * std::exp(-p.r);
  if (below && end_gap < 0.0) {
    cert.relation = OrderRelation::below_exponential;
  } else if (above && end_gap > 0.0) {
    cert.relation = OrderRelation::above_exponential;
  }
  return cert;
}

namespace {

double parse_number(const std::string& token, const std::string& key) {
  const std::string value = token.substr(key.size() + 1);
  try {
    std::size_t pos = 0;
    const double x = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return x;
  } catch (const std::exception&) {
    throw HistorySpecError("history spec: invalid number '" + value + "' in token '" + token + "'");
  }
}

int parse_int(const std::string& token, const std::string& key) {
  const double x = parse_number(token, key);
  const int k = static_cast<int>(x);
  if (static_cast<double>(k) != x) {
    throw HistorySpecError("history spec: token '" + token + "' requires an integer");
  }
  return k;
}

// key=value tokens separated by commas; keys must match `keys` exactly.
std::vector<double> parse_kv(const std::string& body, const std::vector<std::string>& keys,
                             const std::vector<bool>& integral) {
  std::vector<std::string> tokens;
  std::stringstream ss(body);
  std::string tok;
  while (std::getline(ss, tok, ',')) tokens.push_back(tok);
  if (tokens.size() != keys.size()) {
    throw HistorySpecError("history spec: expected " + std::to_string(keys.size()) +
                           " key=value token(s), got '" + body + "'");
  }
  std::vector<double> out(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const std::string& expect = keys[i];
    if (tokens[i].rfind(expect + "=", 0) != 0) {
      throw HistorySpecError("history spec: unexpected token '" + tokens[i] + "' (expected " +
                             expect + "=<value>)");
    }
    out[i] = integral[i] ? parse_int(tokens[i], expect) : parse_number(tokens[i], expect);
  }
  return out;
}

HistoryFn load_table_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw HistorySpecError("history spec: cannot open table file '" + path + "'");
  std::vector<double> s, v;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    if (line_no == 1 && line.find_first_not_of("sphi, \r") == std::string::npos) continue;  // header
    std::stringstream row(line);
    std::string a, b;
    if (!std::getline(row, a, ',') || !std::getline(row, b)) {
      throw HistorySpecError("history spec: malformed table row '" + line + "'");
    }
    try {
      s.push_back(std::stod(a));
      v.push_back(std::stod(b));
    } catch (const std::exception&) {
      throw HistorySpecError("history spec: invalid number in table row '" + line + "'");
    }
  }
  if (s.size() < 2) throw HistorySpecError("history spec: table '" + path + "' needs at least two rows");
  if (std::abs(s.front() + 1.0) > 1e-9 || std::abs(s.back()) > 1e-9) {
    throw HistorySpecError("history spec: table abscissae must run from -1 to 0");
  }
  s.front() = -1.0;
  s.back() = 0.0;
  try {
    return HistoryFn::tabulated(std::move(s), std::move(v));
  } catch (const std::invalid_argument& e) {
    throw HistorySpecError(std::string("history spec: ") + e.what());
  }
}

}  // namespace

HistoryFn parse_history_spec(const std::string& spec, double r) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) {
    throw HistorySpecError("history spec: missing ':' in '" + spec + "'");
  }
  const std::string family = spec.substr(0, colon);
  const std::string body = spec.substr(colon + 1);
  try {
    if (family == "const") {
      const auto kv = parse_kv(body, {"v"}, {false});
      return HistoryFn::constant(kv[0]);
    }
    if (family == "stepramp") {
      const auto kv = parse_kv(body, {"q"}, {false});
      return HistoryFn::step_ramp(1.0, -0.5, kv[0]);
    }
    if (family == "exp") {
      const auto kv = parse_kv(body, {"c"}, {false});
      return HistoryFn::exp_profile(kv[0], r, {});
    }
    if (family == "thm2") {
      const auto kv = parse_kv(body, {"c", "delta"}, {false, false});
      return make_below_exponential_history(kv[0], r, kv[1]);
    }
    if (family == "thm3") {
      const auto kv = parse_kv(body, {"c", "delta"}, {false, false});
      return make_above_exponential_history(kv[0], r, kv[1]);
    }
    if (family == "osc") {
      const auto kv = parse_kv(body, {"c", "delta", "k"}, {false, false, true});
      return HistoryFn::exp_profile(kv[0], r,
                                    ExpProfileSpec{{}, kv[1], static_cast<int>(kv[2])});
    }
    if (family == "table") {
      return load_table_csv(body);
    }
  } catch (const HistorySpecError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw HistorySpecError(std::string("history spec: ") + e.what());
  }
  throw HistorySpecError("history spec: unknown family '" + family + "'");
}

}  // namespace dlog
