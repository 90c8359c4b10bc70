#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "kobalab/cpoint.hpp"
#include "kobalab/domains.hpp"
#include "kobalab/grade.hpp"

namespace kobalab {

/// The closed-form disc families.
///
///   F1  (c, z, 0, ...)
///   F2  (-eps + sqrt(eps) z, z)
///   F3  (-eps + eps^(1-1/(2mu)) z, B_alpha(z)),    alpha = (eps-delta)/eps^(1-1/(2mu))
///   F4  (-delta - a z^nu, B_alpha(z)),             nu = ceil(mu), a = a0 eps^(1-nu/(2mu)),
///                                                  alpha = ((eps-delta)/a)^(1/nu)
///   F5  (z, m_eps(z) m_delta(z)),                  m_t(z) = (z+t)/(1+t z)
///   F6  (-eps + (1-eps) z, z)
///   F7  (-eps + C eps^(1-1/mu) z, z),              mu > 1
///   F8  (-eps + C eps^(1-1/mu) z, z),              target GMinus(mu)
enum class Family { F1, F2, F3, F4, F5, F6, F7, F8 };

std::string_view to_string(Family f);
Family family_from_string(std::string_view s);

struct FamilyParams {
  double eps = 0.0;
  double delta = 0.0;
  double mu = 0.0;
  Complex c{};       ///< F1
  double a0 = 0.0;   ///< F4; 0 selects the cached search value
  double C = 0.0;    ///< F7, F8; 0 selects the family default
  std::size_t dim = 2;
};

/// zeta -> (p zeta + q) / (r zeta + s)
struct Mobius {
  Complex p{1.0}, q{}, r{}, s{1.0};

  Complex operator()(Complex z) const { return (p * z + q) / (r * z + s); }
  Complex derivative(Complex z) const;
  bool is_identity() const;
  /// (*this) o inner
  Mobius after(const Mobius& inner) const;

  /// zeta -> (theta zeta + a) / (1 + conj(a) theta zeta), |a| < 1, |theta| = 1.
  static Mobius automorphism(Complex a, Complex theta = 1.0);
};

/// One coordinate m_w(theta * prod_i (z - a_i)/(1 - conj(a_i) z)), m_w(u) = (u + w)/(1 + conj(w) u).
struct MobiusCoordinate {
  Complex center{};
  Complex rotation{1.0};
  std::vector<Complex> zeros;
};

struct ExplicitRep {
  Family family;
  FamilyParams params;
  // Derived once at construction: first-coordinate factor, Blaschke zero, F4 power.
  double scale = 0.0;
  double alpha = 0.0;
  int nu = 1;
};
struct PolynomialRep {
  /// coeffs[j][k] is the coefficient of z^k in coordinate j.
  std::vector<std::vector<Complex>> coeffs;
  /// Optional outer chart: coordinate j becomes (q + c_j) / (1 + conj(c_j) q) with q the
  /// polynomial value. Empty means no chart.
  std::vector<Complex> chart;
};
struct MobiusRep {
  std::vector<MobiusCoordinate> coords;
};

class AnalyticDisc {
 public:
  using Representation = std::variant<ExplicitRep, PolynomialRep, MobiusRep>;

  /// No validity checks; use paper_disc for validated family discs.
  static AnalyticDisc explicit_family(Family f, const FamilyParams& p);
  static AnalyticDisc polynomial(std::vector<std::vector<Complex>> coeffs, std::vector<Complex> chart = {});
  static AnalyticDisc mobius_composite(std::vector<MobiusCoordinate> coords);

  std::size_t dim() const;
  const Representation& rep() const { return rep_; }
  const Mobius& reparam() const { return reparam_; }

  /// Throw ArgumentError unless |z| < 1.
  CPoint eval(Complex z) const;
  CPoint derivative(Complex z) const;
  /// Skips the |z| < 1 check.
  CPoint eval_unchecked(Complex z) const;

  /// This disc precomposed with a disc automorphism.
  AnalyticDisc precomposed(const Mobius& m) const;

  std::string describe() const;

 private:
  explicit AnalyticDisc(Representation rep) : rep_(std::move(rep)) {}
  CPoint base_eval(Complex w) const;
  CPoint base_derivative(Complex w) const;

  Representation rep_;
  Mobius reparam_{};
};

inline CPoint eval(const AnalyticDisc& d, Complex z) { return d.eval(z); }
inline CPoint derivative(const AnalyticDisc& d, Complex z) { return d.derivative(z); }

/// B_alpha(z) = z (z - alpha) / (1 - alpha z); throws unless 0 <= alpha < 1.
Complex blaschke(double alpha, Complex z);
Complex blaschke_derivative(double alpha, Complex z);

/// Pseudohyperbolic distance |(a - b)/(1 - conj(b) a)| on the unit disc.
double pseudo_hyperbolic(Complex a, Complex b);

/// Disc psi with psi(0) = d(u0), psi(alpha) = d(u1), alpha = pseudo_hyperbolic(u0, u1) >= 0.
struct Recentered {
  AnalyticDisc disc;
  double alpha;
};
Recentered recenter(const AnalyticDisc& d, Complex u0, Complex u1);

double f3_alpha(double eps, double delta, double mu);
int f4_nu(double mu);
double f4_alpha(double eps, double delta, double mu, double a0);
/// Largest C with F_mu(x_mu) >= eps/2.
double f7_default_constant(double mu);
/// Supremum of constants C for which the F8 disc stays in GMinus(mu).
double f8_critical_constant(double mu);
double f8_default_constant();
/// Cached largest power-of-two a0 whose grid verification passes over an eps sweep.
double f4_a0(double mu);

/// Validated family disc. ArgumentError names the violated condition.
AnalyticDisc paper_disc(Family f, FamilyParams p);

/// Parameter values at which the family disc attains its two interpolation points
/// (first at zeta_first, second at zeta_second), e.g. F3: p_eps at 0 and p_delta at alpha.
struct InterpolationNodes {
  Complex first;
  Complex second;
};
InterpolationNodes interpolation_nodes(Family f, const FamilyParams& p);

// ---------------------------------------------------------------------------
// Containment certification

enum class VerifyMode { Analytic, Grid, Auto };

struct GridParams {
  int rings = 20;       ///< radii 1 - 2^-k, k = 1..rings
  int angles = 4096;
  /// Interior rings scanned after the outer ones: radii j/32 for j = 1..interior_linear,
  /// then 2^-k for k = 6..5+interior_geometric.
  int interior_linear = 15;
  int interior_geometric = 15;
  double tau = 0.0;     ///< 0 selects containment_tolerance(domain)
  bool include_center = false;
};

struct GridStats {
  std::size_t samples = 0;
  double worst_margin = 0.0;  ///< max margin over samples (closest to the boundary)
  double best_margin = 0.0;
  Complex worst_zeta{};
  int rings = 0;  ///< total ring count including interior rings
  int angles = 0;
  double tau = 0.0;
};

struct ContainmentCertificate {
  enum class Kind { Analytic, Grid };
  Kind kind = Kind::Grid;
  std::string inequality;  ///< analytic inequality id
  GridStats grid;          ///< sample statistics for grid certificates
  std::string domain;
  std::string disc;

  Grade grade() const { return kind == Kind::Analytic ? Grade::Certified : Grade::Numeric; }
};

struct ContainmentReport {
  bool ok = false;
  std::optional<ContainmentCertificate> certificate;
  std::string reason;
  Complex witness_zeta{};
  CPoint witness_point;
  double witness_margin = 0.0;
  GridStats grid;
};

/// True if an analytic verifier covers (disc, domain).
bool has_analytic_verifier(const AnalyticDisc& disc, const DomainSpec& domain);

/// Analytic mode throws CapabilityError when no verifier is registered; Auto
/// falls back to the grid.
ContainmentReport verify_containment(const AnalyticDisc& disc, const DomainSpec& domain,
                                     VerifyMode mode = VerifyMode::Auto, const GridParams& grid = {});

/// Grid margins only, no certificate bookkeeping.
GridStats grid_scan(const AnalyticDisc& disc, const DomainSpec& domain, const GridParams& grid = {});

}  // namespace kobalab
