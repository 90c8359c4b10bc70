#include <doctest.h>

#include <cmath>

#include "kobalab/sibony.hpp"
#include "kobalab/upper.hpp"

using namespace kobalab;

namespace {

SamplingOptions light() {
  SamplingOptions o;
  o.samples = 2000;
  o.seed = 3;
  return o;
}

}  // namespace

TEST_CASE("closed-form Levi density of f at -eps") {
  for (double mu : {1.5, 2.0})
    for (double eps : {1e-2, 1e-4})
      CHECK(f_levi(mu, eps, -eps) ==
            doctest::Approx(std::pow(eps, 2.0 / mu - 2.0) / 4.0).epsilon(1e-12));
}

TEST_CASE("finite-difference Levi form matches the closed form") {
  CandidateFunction c;
  c.mu = 2.0;
  c.eps = 1e-2;
  const ScalarField f = f_branch(c);
  const CPoint p{-c.eps, 0.0};
  for (const CPoint& X : {CPoint{1.0, 0.0}, CPoint{0.0, 1.0}, CPoint{Complex{0.3, 0.4}, Complex{-0.5, 0.1}}}) {
    const auto cf = levi_form(f, p, X);
    const auto fd = levi_form(f, p, X, true);
    CHECK(cf.method == "closed-form");
    CHECK(fd.method == "finite-difference");
    CHECK(std::abs(cf.value - fd.value) <= 1e-6 * std::max(1.0, std::abs(cf.value)));
  }
}

TEST_CASE("Sibony lower bound is 1-homogeneous") {
  const CPoint X{1.0, 0.0};
  const double base = sibony_lower(2.0, 1e-3, X, light()).value;
  REQUIRE(base > 0.0);
  for (Complex s : {Complex{2.0, 0.0}, Complex{0.0, -0.5}, Complex{3.0, 4.0}}) {
    const double v = sibony_lower(2.0, 1e-3, s * X, light()).value;
    CHECK(std::abs(v - std::abs(s) * base) <= 1e-10 * std::abs(s) * base);
  }
}

TEST_CASE("Sibony lower bound stays below the Kobayashi-Royden upper bound") {
  UpperOptions o;
  o.strategy = Strategy::ExplicitFamily;
  for (double mu : {1.5, 2.0}) {
    const auto G = DomainSpec::g_plain(mu);
    for (double eps : {1e-2, 1e-3, 1e-4}) {
      for (const CPoint& X : {CPoint{1.0, 0.0}, CPoint{0.0, 1.0}, CPoint{0.6, Complex{0.0, 0.8}}}) {
        const double s = sibony_lower(mu, eps, X, light()).value;
        const double k = kobayashi_royden_upper(G, normal_point(G, eps), X, o).value;
        INFO("mu = " << mu << ", eps = " << eps);
        CHECK(s <= k);
      }
    }
  }
}

TEST_CASE("candidate with alpha = 1 is admissible at mu = 2") {
  const CandidateFunction c = sibony_candidate(2.0, 1e-2, 1.0, 0.0, 2, light());
  CHECK(c.c1 > 0.0);
  CHECK(c.collar_inner() < c.collar_outer());
  const auto r = check_admissibility(c, light());
  CHECK(r.ok);
  CHECK(r.max_u <= 0.0);
  CHECK(r.min_dominance >= 0.0);
  // u is negative at the base point and the candidate is plurisubharmonic there.
  CHECK(c.u(CPoint{-c.eps, 0.0}) < 0.0);
  CHECK(c.levi_at_base(CPoint{1.0, 0.0}) > 0.0);
}

TEST_CASE("c1 keeps the real part of z1 below eps/2") {
  const double c1 = find_c1(2.0, 1e-2, 2, light());
  CHECK(c1 > 0.0);
  // On GPlain(2): Re z1 < |z2|^2 <= c1^2 eps.
  CHECK(c1 * c1 * 1e-2 <= 0.5e-2 * (1.0 + 1e-9));
}

TEST_CASE("adaptive alpha") {
  CHECK(adaptive_alpha(std::exp(-4.0)) == doctest::Approx(0.25));
  CHECK(adaptive_alpha(1e-6) < adaptive_alpha(1e-2));
}
