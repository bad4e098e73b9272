#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "dlog/history.hpp"

using namespace dlog;

TEST_CASE("constant and step-ramp evaluation") {
  const HistoryFn one = HistoryFn::constant(1.0);
  CHECK(one(-1.0) == 1.0);
  CHECK(one(-0.3) == 1.0);
  CHECK(one(0.0) == 1.0);

  const HistoryFn ramp = HistoryFn::step_ramp(1.0, -0.5, 4.0);
  CHECK(ramp(-0.75) == 1.0);
  CHECK(ramp(-1.0) == 1.0);
  CHECK(ramp(-0.5) == 1.0);
  CHECK(ramp(0.0) == 4.0);
  CHECK(ramp(-0.25) == doctest::Approx(2.5));
}

TEST_CASE("step ramp is continuous at the plateau end") {
  const HistoryFn ramp = HistoryFn::step_ramp(1.0, -0.5, 4.0);
  CHECK(ramp(-0.5 + 1e-9) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(ramp(-0.5 - 1e-9) == 1.0);
}

TEST_CASE("exp profile evaluation") {
  const HistoryFn pure = HistoryFn::exp_profile(1.0, 1.0, {});
  CHECK(pure(-1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(pure(0.0) == doctest::Approx(1.0).epsilon(1e-15));

  // quadratic profile phi(s) = 2 exp(s - s^2) at s = -0.5
  const HistoryFn f = HistoryFn::exp_profile(2.0, 1.0, ExpProfileSpec{{0.0, 0.0, -1.0}, 0.0, 0});
  CHECK(f(-0.5) == doctest::Approx(2.0 * std::exp(-0.5 - 0.25)).epsilon(1e-15));
}

TEST_CASE("evaluation outside the domain is a domain error") {
  const HistoryFn one = HistoryFn::constant(1.0);
  CHECK_THROWS_AS(one(-1.0001), std::domain_error);
  CHECK_THROWS_AS(one(0.0001), std::domain_error);
}

TEST_CASE("construction rejects non-positive histories") {
  CHECK_THROWS_AS(HistoryFn::constant(0.0), std::invalid_argument);
  CHECK_THROWS_AS(HistoryFn::constant(-2.0), std::invalid_argument);
  CHECK_THROWS_AS(HistoryFn::step_ramp(1.0, -0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(HistoryFn::step_ramp(1.0, -0.5, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(HistoryFn::tabulated({-1.0, -0.5, 0.0}, {1.0, -0.1, 1.0}),
                  std::invalid_argument);
}

TEST_CASE("blow-up seed pins the plateau and the terminal value") {
  const Params p(1.0, 1.0);
  const HistoryFn seed = make_blowup_seed(p, 4.0);
  CHECK(seed(-1.0) == 1.0);
  CHECK(seed(-0.5) == 1.0);
  CHECK(seed(0.0) == 4.0);  // q = h/(r alpha) = 4

  const HistoryFn seed2 = make_blowup_seed(Params(2.0, 0.5), 2.0);
  CHECK(seed2(0.0) == doctest::Approx(2.0));  // q = 2/(2*0.5)

  CHECK_THROWS_AS(make_blowup_seed(Params(1.0, -0.5), 2.0), std::invalid_argument);
  CHECK_THROWS_AS(make_blowup_seed(Params(1.0, 0.0), 2.0), std::invalid_argument);
  CHECK_THROWS_AS(make_blowup_seed(Params(1.0, 1.0), 1.5), std::invalid_argument);
}

TEST_CASE("ordered families touch the envelope at 0 and separate at -1") {
  const HistoryFn below = make_below_exponential_history(1.0, 1.0, 0.5);
  CHECK(below(0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(below(-1.0) == doctest::Approx(std::exp(-1.5)).epsilon(1e-15));
  CHECK(below(-1.0) < std::exp(-1.0));

  const HistoryFn above = make_above_exponential_history(1.0, 1.0, 0.5);
  CHECK(above(-1.0) == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
  CHECK(above(-1.0) > std::exp(-1.0));
  CHECK(above(0.0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("certify_order recognizes the constructed families") {
  const Params p(1.0, std::exp(-1.0));
  {
    const auto cert = certify_order(make_below_exponential_history(1.0, 1.0, 0.5), p, 1.0, 1000);
    CHECK(cert.relation == OrderRelation::below_exponential);
    CHECK(cert.checked_grid_spacing == doctest::Approx(1e-3));
  }
  {
    const auto cert = certify_order(make_above_exponential_history(1.0, 1.0, 0.5), p, 1.0, 1000);
    CHECK(cert.relation == OrderRelation::above_exponential);
  }
  {
    // sign-changing profile: psi(s) = 0.3 sin(4 pi s)
    const HistoryFn osc = HistoryFn::exp_profile(1.0, 1.0, ExpProfileSpec{{}, 0.3, 2});
    const auto cert = certify_order(osc, p, 1.0, 1000);
    CHECK(cert.relation == OrderRelation::neither);
  }
  {
    // phi(0) != c
    const auto cert = certify_order(make_below_exponential_history(1.0, 1.0, 0.5), p, 2.0, 1000);
    CHECK(cert.relation == OrderRelation::neither);
  }
  CHECK_THROWS_AS(certify_order(HistoryFn::constant(1.0), p, 1.0, 50), std::invalid_argument);
}

TEST_CASE("certify_order on randomized family parameters") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> uc(0.1, 10.0);
  std::uniform_real_distribution<double> ur(0.1, 3.0);
  std::uniform_real_distribution<double> ud(1e-3, 5.0);
  for (int i = 0; i < 100; ++i) {
    const double c = uc(rng), r = ur(rng), d = ud(rng);
    const Params p(r, std::exp(-r));
    CHECK(certify_order(make_below_exponential_history(c, r, d), p, c, 200).relation ==
          OrderRelation::below_exponential);
    CHECK(certify_order(make_above_exponential_history(c, r, d), p, c, 200).relation ==
          OrderRelation::above_exponential);
  }
}

TEST_CASE("tabulated interpolation hits knots and preserves positivity") {
  const std::vector<double> s{-1.0, -0.7, -0.4, -0.1, 0.0};
  const std::vector<double> v{2.0, 0.01, 3.0, 0.5, 1.0};
  const HistoryFn tab = HistoryFn::tabulated(s, v);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(tab(s[i]) == doctest::Approx(v[i]).epsilon(1e-14));
  }
  double lo = 1e300;
  for (double x = -1.0; x <= 0.0; x += 1e-4) lo = std::min(lo, tab(x));
  CHECK(lo > 0.0);
}

TEST_CASE("random positive knots give positive interpolants") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> uv(0.05, 5.0);
  for (int i = 0; i < 50; ++i) {
    const HistoryFn tab = HistoryFn::tabulated({-1.0, -0.6, -0.3, 0.0},
                                               {uv(rng), uv(rng), uv(rng), uv(rng)});
    double lo = 1e300;
    for (double x = -1.0; x <= 0.0; x += 1e-3) lo = std::min(lo, tab(x));
    CHECK(lo > 0.0);
  }
}

TEST_CASE("history spec mini-language") {
  CHECK(parse_history_spec("const:v=2.5", 1.0)(-0.5) == 2.5);
  CHECK(parse_history_spec("stepramp:q=4", 1.0)(0.0) == 4.0);
  CHECK(parse_history_spec("exp:c=2", 1.0)(0.0) == doctest::Approx(2.0));
  CHECK(parse_history_spec("exp:c=1e-1", 1.0)(0.0) == doctest::Approx(0.1));
  CHECK(parse_history_spec("thm2:c=1,delta=0.5", 1.0)(-1.0) ==
        doctest::Approx(std::exp(-1.5)));
  CHECK(parse_history_spec("thm3:c=1,delta=0.5", 1.0)(-1.0) ==
        doctest::Approx(std::exp(-0.5)));
  const HistoryFn osc = parse_history_spec("osc:c=1,delta=0.2,k=2", 1.0);
  CHECK(osc(-0.125) == doctest::Approx(std::exp(-0.125 + 0.2 * std::sin(-std::acos(-1.0) / 2.0))));
}

TEST_CASE("history spec errors name the offending token") {
  CHECK_THROWS_WITH_AS(parse_history_spec("noexist:v=1", 1.0),
                       doctest::Contains("unknown family 'noexist'"), HistorySpecError);
  CHECK_THROWS_WITH_AS(parse_history_spec("const:w=1", 1.0), doctest::Contains("'w=1'"),
                       HistorySpecError);
  CHECK_THROWS_WITH_AS(parse_history_spec("const:v=abc", 1.0), doctest::Contains("'abc'"),
                       HistorySpecError);
  CHECK_THROWS_WITH_AS(parse_history_spec("const", 1.0), doctest::Contains("missing ':'"),
                       HistorySpecError);
  CHECK_THROWS_WITH_AS(parse_history_spec("osc:c=1,delta=0.2,k=1.5", 1.0),
                       doctest::Contains("integer"), HistorySpecError);
}

TEST_CASE("table histories load from csv") {
  const char* path = "test_history_table.csv";
  {
    std::ofstream out(path);
    out << "s,phi\n-1,1\n-0.5,2\n0,1.5\n";
  }
  const HistoryFn tab = parse_history_spec(std::string("table:") + path, 1.0);
  CHECK(tab(-1.0) == doctest::Approx(1.0));
  CHECK(tab(-0.5) == doctest::Approx(2.0));
  CHECK(tab(0.0) == doctest::Approx(1.5));
  std::remove(path);

  CHECK_THROWS_WITH_AS(parse_history_spec("table:/nonexistent/file.csv", 1.0),
                       doctest::Contains("cannot open"), HistorySpecError);
  {
    std::ofstream out(path);
    out << "-0.9,1\n0,1.5\n";  // does not start at -1
  }
  CHECK_THROWS_WITH_AS(parse_history_spec(std::string("table:") + path, 1.0),
                       doctest::Contains("-1 to 0"), HistorySpecError);
  std::remove(path);
}
