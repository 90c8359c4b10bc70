#include "kobalab/bound.hpp"

#include <cmath>
#include <limits>

namespace kobalab {

std::string_view to_string(Quantity q) {
  switch (q) {
    case Quantity::Lempert: return "ell";
    case Quantity::LempertM: return "ell_m";
    case Quantity::LempertLogM: return "l_m";
    case Quantity::KR: return "kappa";
    case Quantity::KRM: return "kappa_m";
    case Quantity::KHat: return "kappa_hat";
    case Quantity::KDist: return "k";
    case Quantity::Sibony: return "sibony";
  }
  return "?";
}

std::string_view to_string(Direction d) { return d == Direction::Upper ? "upper" : "lower"; }

Quantity quantity_from_string(std::string_view s) {
  for (auto q : {Quantity::Lempert, Quantity::LempertM, Quantity::LempertLogM, Quantity::KR, Quantity::KRM,
                 Quantity::KHat, Quantity::KDist, Quantity::Sibony})
    if (to_string(q) == s) return q;
  throw ArgumentError("unknown quantity '" + std::string(s) + "'");
}

double Chain::aggregate_ell() const {
  double s = 0.0;
  for (const auto& b : legs) s += b.value;
  return s;
}

double Chain::aggregate_l() const {
  double s = 0.0;
  for (const auto& b : legs) s += b.value >= 1.0 ? std::numeric_limits<double>::infinity() : std::atanh(b.value);
  return s;
}

Grade Chain::grade() const {
  Grade g = Grade::Certified;
  for (const auto& b : legs) g = weakest(g, b.grade);
  return g;
}

Chain Chain::reversed() const {
  Chain out;
  out.points.assign(points.rbegin(), points.rend());
  out.legs.assign(legs.rbegin(), legs.rend());
  for (auto& b : out.legs)
    if (b.disc) std::swap(b.disc->node_z, b.disc->node_w);
  return out;
}

}  // namespace kobalab
