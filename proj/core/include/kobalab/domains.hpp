#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "kobalab/cpoint.hpp"
#include "kobalab/grade.hpp"

namespace kobalab {

/// Modulus of continuity psi(x) = x * psi1(x) with psi1 increasing and
/// psi1(0+) = 0.
struct ModulusOfContinuity {
  enum class Kind {
    Power,  ///< psi(x) = x^p, p > 1
    Log,    ///< psi(x) = x / (1 + |log x|) for 0 < x <= 1, extended by x for x > 1
  };
  Kind kind = Kind::Power;
  double exponent = 2.0;  ///< p for Kind::Power

  static ModulusOfContinuity power(double p);
  static ModulusOfContinuity log_type();

  double operator()(double x) const;
  std::string name() const;
};

/// q(z) = a11 |z1|^2 + Re(b11 z1^2) + Re(c12 z1 conj(z2)) + Re(d12 z1 z2)
///        + Re(alpha2 z2^2) + levi22 |z2|^2
/// A real-valued quadratic form on C^2; the normalization requires levi22 = -1.
struct QuadraticForm {
  double a11 = 0.0;
  Complex b11{};
  Complex c12{};
  Complex d12{};
  Complex alpha2{};
  double levi22 = -1.0;

  double operator()(Complex z1, Complex z2) const;
};

/// Local coordinates in which {Re z1 + q(z) < 0} contains {Re z1' < |z2'|^2 / 4}
/// near the origin. The map back to the original coordinates is
/// (z1', z2') -> (z1' + alpha1 z1'^2 - alpha2 z2'^2, z2').
struct QuadNormalization {
  QuadraticForm form;
  Complex alpha1{};
  Complex alpha2{};
  double c1 = 0.0;  ///< |q1(z1)| <= c1 |z1|^2
  double c2 = 0.0;  ///< |q2(z1, z2)| <= c2 |z1| |z2|
  double c3 = 0.0;  ///< c1 + c2^2/2 + alpha1 + 1
  double radius = 0.0;

  /// Preimage of a normalized point in the original coordinates.
  CPoint to_original(const CPoint& z) const;
};

enum class DomainKind { PolyDisc, Ball, GPlain, GTilde, GMinus, GPsi, Punctured, QuadImage };

std::string_view to_string(DomainKind k);
DomainKind domain_kind_from_string(std::string_view s);

/// One of the model domains. Immutable value type.
///
///   PolyDisc(n)   D^n
///   Ball(n)       unit ball of C^n
///   GPlain(mu,n)  {z in D^n : Re z1 < sum_{j>=2} |z_j|^mu}
///   GTilde(mu,n)  {z in D^n : Re z1 < |Im z1|^mu + sum_{j>=2} |z_j|^mu}
///   GMinus(mu)    {z in D^2 : Re z1 < -|Im z1| + |z2|^mu}
///   GPsi(psi,n)   {z in D^n : Re z1 < psi(|Im z1| + ||z'||)}
///   Punctured     base domain minus a finite point set
///   QuadImage     {z in r D^2 : Re x1 + q(x) < 0}, x the preimage of z under
///                 the quadratic normalization
class DomainSpec {
 public:
  static DomainSpec polydisc(std::size_t n);
  static DomainSpec ball(std::size_t n);
  static DomainSpec g_plain(double mu, std::size_t n = 2);
  static DomainSpec g_tilde(double mu, std::size_t n = 2);
  static DomainSpec g_minus(double mu);
  static DomainSpec g_psi(ModulusOfContinuity psi, std::size_t n = 2);
  static DomainSpec punctured(const DomainSpec& base, std::vector<CPoint> excluded);
  static DomainSpec quad_image(const QuadNormalization& quad);

  DomainKind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  double mu() const { return mu_; }
  const ModulusOfContinuity& psi() const { return psi_; }
  const DomainSpec& base() const;
  const std::vector<CPoint>& excluded() const { return excluded_; }
  const QuadNormalization& quad() const { return quad_; }

  /// True for GPlain, GTilde, GMinus, GPsi (the domains with distinguished
  /// boundary point 0 and inner normal (-1, 0, ..., 0)).
  bool is_g_variant() const;
  /// Sampled containment checks cannot certify avoidance of a point set.
  bool demonstration_grade() const { return kind_ == DomainKind::Punctured; }

  /// Max over defining inequalities of (lhs - rhs); negative inside.
  /// Does not check dimension.
  double defining_margin(std::span<const Complex> z) const;

  std::string describe() const;

 private:
  DomainSpec() = default;

  DomainKind kind_ = DomainKind::PolyDisc;
  std::size_t dim_ = 2;
  double mu_ = 0.0;
  ModulusOfContinuity psi_{};
  std::shared_ptr<const DomainSpec> base_;
  std::vector<CPoint> excluded_;
  QuadNormalization quad_{};
};

struct Membership {
  bool inside = false;
  double margin = 0.0;
};

/// Membership flag and signed margin; throws ArgumentError on dimension mismatch.
Membership contains(const DomainSpec& domain, const CPoint& z);

/// Safety buffer for containment certification: margin must be <= -tau.
double containment_tolerance(const DomainSpec& domain);

struct BoundaryData {
  double gap = 0.0;
  CPoint nearest;
  CPoint inner_normal;
  Grade grade = Grade::Certified;
  /// Nearest point is known to be unique (GTilde with mu >= 1 near 0).
  bool unique = true;
};

struct BoundaryOptions {
  /// For GTilde, nearest points within this radius of 0 are unique (mu >= 1).
  double unique_neighborhood = 0.25;
  int restarts = 8;
  unsigned seed = 7;
};

/// Distance to the complement with the nearest boundary point and inner normal.
/// Supported: PolyDisc, Ball (closed form), GTilde with mu >= 1 (multi-start
/// descent on the boundary parametrization).
BoundaryData boundary_data(const DomainSpec& domain, const CPoint& z, const BoundaryOptions& opts = {});

/// p + t n_p for the distinguished boundary point p. For G-variants p = 0 and
/// the result is (-t, 0, ..., 0); for PolyDisc/Ball p = (1, 0, ..., 0).
CPoint normal_point(const DomainSpec& domain, double t);

/// If z = (-t, 0, ..., 0) with 0 < t < 1 returns t, otherwise a negative value.
double normal_parameter(const CPoint& z);

struct QuadNormalizationOptions {
  int grid_per_axis = 18;  ///< 18^4 ~ 10^5 sample points
  std::vector<double> radii = {0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625, 0.0078125, 0.00390625};
};

/// Builds the quadratic normalization for q and verifies by sampling on shrinking
/// radii that {Re z1' < |z2'|^2/4} ∩ r D^2 lands in {Re x1 + q(x) < 0}.
QuadNormalization normalize_quadratic(const QuadraticForm& q, const QuadNormalizationOptions& opts = {});

}  // namespace kobalab
