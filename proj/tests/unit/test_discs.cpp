#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kobalab/discs.hpp"
#include "kobalab/optimize.hpp"

using namespace kobalab;

namespace {

std::vector<AnalyticDisc> sample_discs() {
  std::vector<AnalyticDisc> out;
  FamilyParams p;
  p.eps = 0.01;
  p.delta = 0.008;
  p.mu = 2.0;
  out.push_back(paper_disc(Family::F3, p));
  p.delta = 0.002;
  out.push_back(paper_disc(Family::F4, p));
  p.delta = 0.005;
  out.push_back(paper_disc(Family::F5, p));
  out.push_back(paper_disc(Family::F2, p));
  out.push_back(paper_disc(Family::F6, p));
  out.push_back(paper_disc(Family::F7, p));
  out.push_back(paper_disc(Family::F8, p));
  p.c = {0.3, -0.2};
  out.push_back(paper_disc(Family::F1, p));
  out.push_back(AnalyticDisc::polynomial({{0.1, 0.5, Complex{0.0, 0.2}}, {0.0, 0.3, 0.0, -0.1}}));
  out.push_back(AnalyticDisc::mobius_composite({{0.2, 1.0, {0.3}}, {Complex{0.0, 0.1}, Complex{0.0, 1.0}, {0.0, -0.4}}}));
  out.push_back(AnalyticDisc::polynomial({{0.0, 0.4, 0.1}, {0.0, Complex{0.0, 0.5}}}, {Complex{0.6, 0.2}, -0.7}));
  out.push_back(out.front().precomposed(Mobius::automorphism({0.3, 0.1}, Complex{0.0, 1.0})));
  return out;
}

}  // namespace

TEST_CASE("derivative agrees with central differences on |zeta| <= 0.99") {
  Rng rng(21);
  std::uniform_real_distribution<double> R(0.0, 0.99), T(0.0, 2.0 * std::numbers::pi);
  const double h = 1e-6;
  for (const auto& d : sample_discs()) {
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
      const Complex z = std::polar(R(rng), T(rng));
      const CPoint fd = (1.0 / (2.0 * h)) * (d.eval_unchecked(z + h) - d.eval_unchecked(z - h));
      const CPoint an = d.derivative(z);
      worst = std::max(worst, (fd - an).norm() / std::max(1.0, an.norm()));
    }
    INFO(d.describe());
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("eval rejects points off the open disc") {
  const auto d = sample_discs().front();
  CHECK_THROWS_AS(d.eval(1.0), ArgumentError);
  CHECK_THROWS_AS(d.derivative(Complex{0.0, -1.2}), ArgumentError);
  CHECK_NOTHROW(d.eval_unchecked(1.0));
}

TEST_CASE("Blaschke factor vanishes at 0 and alpha and is unimodular on the circle") {
  for (double a : {0.0, 0.1, 0.5, 0.93}) {
    CHECK(std::abs(blaschke(a, 0.0)) <= 1e-12);
    CHECK(std::abs(blaschke(a, a)) <= 1e-12);
    for (int k = 0; k < 16; ++k) CHECK(std::abs(std::abs(blaschke(a, std::polar(1.0, k * 0.4))) - 1.0) <= 1e-12);
  }
  CHECK_THROWS_AS(blaschke(1.0, 0.2), ArgumentError);
}

TEST_CASE("F3 and F4 interpolate the normal points at their nodes") {
  for (double mu : {1.25, 1.5, 2.0}) {
    for (double eps : {1e-2, 1e-4}) {
      FamilyParams p;
      p.eps = eps;
      p.mu = mu;
      p.delta = 0.9 * eps;
      {
        const auto d = paper_disc(Family::F3, p);
        const auto nodes = interpolation_nodes(Family::F3, p);
        const double alpha = f3_alpha(eps, p.delta, mu);
        CHECK(std::abs(nodes.second - alpha) <= 1e-15);
        CHECK(std::abs(d.eval(0.0)[0] + eps) <= 1e-12);
        CHECK(std::abs(d.eval(0.0)[1]) <= 1e-12);
        CHECK(std::abs(d.eval(alpha)[0] + p.delta) <= 1e-12);
        CHECK(std::abs(d.eval(alpha)[1]) <= 1e-12);
      }
      p.delta = 0.25 * eps;
      {
        const auto d = paper_disc(Family::F4, p);
        const auto nodes = interpolation_nodes(Family::F4, p);
        const CPoint a = d.eval(nodes.first), b = d.eval(nodes.second);
        CHECK(std::abs(a[1]) <= 1e-12);
        CHECK(std::abs(b[1]) <= 1e-12);
        // One node carries -delta and the other -eps.
        const double lo = std::min(-a[0].real(), -b[0].real()), hi = std::max(-a[0].real(), -b[0].real());
        CHECK(std::abs(lo - p.delta) <= 1e-12);
        CHECK(std::abs(hi - eps) <= 1e-12);
        CHECK(std::abs(a[0].imag()) + std::abs(b[0].imag()) <= 1e-12);
      }
    }
  }
}

TEST_CASE("F3 alpha closed form") {
  // (eps - delta) / eps^(1 - 1/(2 mu)) at mu = 2, eps = 1e-4, delta = eps/2: 0.5e-4 / 1e-3.
  CHECK(f3_alpha(1e-4, 0.5e-4, 2.0) == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(f4_nu(1.5) == 2);
  CHECK(f4_nu(2.0) == 2);
  CHECK(f4_nu(2.1) == 3);
}

TEST_CASE("F4 alpha scales like eps^(1/(2 mu)) and stays below 1") {
  for (double mu : {1.25, 1.5, 2.0}) {
    const double a0 = f4_a0(mu);
    REQUIRE(a0 > 0.0);
    for (double eps : {1e-2, 1e-3, 1e-4, 1e-6}) {
      const double delta = 0.25 * eps;
      const double alpha = f4_alpha(eps, delta, mu, a0);
      CHECK(alpha > 0.0);
      CHECK(alpha < 1.0);
      const int nu = f4_nu(mu);
      const double expected = std::pow(0.75 / a0, 1.0 / nu) * std::pow(eps, 1.0 / (2.0 * mu));
      CHECK(alpha == doctest::Approx(expected).epsilon(1e-12));
      const double scale = std::pow(a0, -1.0 / nu) * std::pow(eps, 1.0 / (2.0 * mu));
      CHECK(alpha >= std::pow(2.0 * mu, -1.0 / nu) * scale);
      CHECK(alpha <= scale);
    }
  }
}

TEST_CASE("paper_disc names the violated condition") {
  FamilyParams p;
  p.eps = 0.01;
  p.mu = 2.0;
  p.delta = 0.002;  // below (1 - 1/(2 mu)) eps
  CHECK_THROWS_WITH_AS(paper_disc(Family::F3, p), doctest::Contains("delta"), ArgumentError);
  p.delta = 0.009;
  CHECK_THROWS_AS(paper_disc(Family::F4, p), ArgumentError);
  p.mu = 0.4;
  CHECK_THROWS_AS(paper_disc(Family::F3, p), ArgumentError);
  p.c = 1.0;
  CHECK_THROWS_AS(paper_disc(Family::F1, p), ArgumentError);
  CHECK(family_from_string("F5") == Family::F5);
  CHECK_THROWS_AS(family_from_string("F9"), ArgumentError);
}

TEST_CASE("disc automorphisms and recentering") {
  const Mobius m = Mobius::automorphism({0.4, -0.1}, std::polar(1.0, 0.7));
  for (int k = 0; k < 12; ++k) CHECK(std::abs(std::abs(m(std::polar(1.0, 0.5 * k))) - 1.0) <= 1e-12);
  const Mobius id = m.after(Mobius::automorphism(0.0));
  CHECK(std::abs(id(0.3) - m(0.3)) <= 1e-14);

  const auto d = sample_discs()[8];
  const Complex u0{0.2, 0.1}, u1{-0.3, 0.4};
  const Recentered r = recenter(d, u0, u1);
  CHECK(r.alpha == doctest::Approx(pseudo_hyperbolic(u0, u1)));
  CHECK(distance(r.disc.eval(0.0), d.eval(u0)) <= 1e-12);
  CHECK(distance(r.disc.eval(r.alpha), d.eval(u1)) <= 1e-12);
}

TEST_CASE("analytic verifiers agree with the grid on valid family discs") {
  FamilyParams p;
  p.eps = 1e-3;
  p.mu = 2.0;
  p.delta = 0.8e-3;
  const auto G = DomainSpec::g_plain(2.0);
  const auto d3 = paper_disc(Family::F3, p);
  REQUIRE(has_analytic_verifier(d3, G));
  const auto a = verify_containment(d3, G, VerifyMode::Analytic);
  const auto g = verify_containment(d3, G, VerifyMode::Grid);
  CHECK(a.ok);
  CHECK(g.ok);
  REQUIRE(a.certificate);
  CHECK(a.certificate->grade() == Grade::Certified);
  REQUIRE(g.certificate);
  CHECK(g.certificate->grade() == Grade::Numeric);
  CHECK(g.grid.worst_margin < 0.0);
}

TEST_CASE("grid verification rejects a disc that leaves the domain") {
  // Straight line through p_eps in the z1 direction crosses Re z1 = 0.
  const auto d = AnalyticDisc::polynomial({{-0.01, 0.5}, {0.0, 0.0}});
  const auto r = verify_containment(d, DomainSpec::g_plain(2.0), VerifyMode::Grid);
  CHECK_FALSE(r.ok);
  CHECK(r.witness_margin > 0.0);
  CHECK(contains(DomainSpec::g_plain(2.0), r.witness_point).margin > -1e-12);
}

TEST_CASE("charted polynomial discs") {
  const std::vector<Complex> centres{Complex{0.6, 0.2}, -0.7};
  const auto d = AnalyticDisc::polynomial({{0.0, 0.5}, {0.0, Complex{0.0, 0.5}}}, centres);
  // The chart sends the inner value 0 to its centre.
  CHECK(distance(d.eval(0.0), CPoint(centres)) <= 1e-15);
  const auto P = DomainSpec::polydisc(2);
  CHECK(has_analytic_verifier(d, P));
  CHECK(verify_containment(d, P, VerifyMode::Analytic).ok);
  CHECK_FALSE(has_analytic_verifier(d, DomainSpec::ball(2)));
  const auto out = AnalyticDisc::polynomial({{0.3, 0.8}, {0.3, 0.2}}, centres);
  CHECK_FALSE(verify_containment(out, P, VerifyMode::Analytic).ok);
  CHECK_THROWS_AS(AnalyticDisc::polynomial({{0.0, 0.5}}, centres), ArgumentError);
  CHECK_THROWS_AS(AnalyticDisc::polynomial({{0.0, 0.5}}, {1.0}), ArgumentError);
}
