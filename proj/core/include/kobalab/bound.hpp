#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kobalab/discs.hpp"
#include "kobalab/grade.hpp"

namespace kobalab {

enum class Quantity {
  Lempert,      ///< ell
  LempertM,     ///< ell^(m)
  LempertLogM,  ///< l^(m)
  KR,           ///< kappa
  KRM,          ///< kappa^(m)
  KHat,         ///< kappa hat
  KDist,        ///< k
  Sibony,       ///< S
};

enum class Direction { Upper, Lower };

std::string_view to_string(Quantity q);
std::string_view to_string(Direction d);
Quantity quantity_from_string(std::string_view s);

struct Chain;

/// A disc witness: disc(node_z) = z, disc(node_w) = w (or the base point and
/// scaled derivative for infinitesimal bounds).
struct DiscWitness {
  AnalyticDisc disc;
  Complex node_z{};
  Complex node_w{};
  std::optional<ContainmentCertificate> certificate;
};

struct PathWitness {
  std::vector<CPoint> nodes;
  std::vector<double> kappa_samples;  ///< upper bounds at the sample points, in path order
  double integral = 0.0;
};

struct Bound {
  Quantity quantity = Quantity::Lempert;
  double value = 0.0;
  Direction direction = Direction::Upper;
  Grade grade = Grade::Certified;
  int m = 1;
  std::string method;
  std::optional<DiscWitness> disc;
  std::shared_ptr<const Chain> chain;
  std::shared_ptr<const PathWitness> path;
  std::vector<CPoint> decomposition;  ///< X_j with X = sum X_j
  std::vector<Bound> pieces;          ///< per-piece bounds for decompositions
  std::vector<std::string> derivation;
};

struct Chain {
  std::vector<CPoint> points;  ///< y_0 = z, ..., y_m = w
  std::vector<Bound> legs;

  std::size_t m() const { return legs.size(); }
  double aggregate_ell() const;
  double aggregate_l() const;
  Grade grade() const;
  /// The same chain traversed from w to z.
  Chain reversed() const;
};

}  // namespace kobalab
