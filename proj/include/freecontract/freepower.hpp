#pragma once

// Fractional free additive convolution powers mu^{⊞T}, T >= 1, of finitely
// atomic probability measures, computed through the subordination function
// omega_T, the right inverse of
//   H_T(z) = T z + (1 - T) F_mu(z) = z + (T - 1)(mean + sum_j c_j / (z - beta_j)),
// with (beta_j, c_j) the Nevanlinna measure rho of F_mu.
//
// On the real line, B_T = {x : (T-1) sum_j c_j / (beta_j - x)^2 > 1} is the set
// where the boundary of omega_T(C+) lifts off the axis, at height f_T(x). The
// map u -> H_T(u + i f_T(u)) is increasing and carries each component of B_T
// onto a component of the absolutely continuous support. The density is then
// -Im G_mu(omega_T(x)) / pi.

#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "freecontract/measures.hpp"

namespace fc {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
  bool contains_open(double x) const { return lo < x && x < hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

inline constexpr double kComponentMergeTol = 1e-10;

struct HValue {
  cplx H;
  cplx Hprime;
};

struct BSet {
  std::vector<Interval> components;   // open intervals, sorted
  std::vector<double> boundary_roots; // real roots of H_T', sorted
};

namespace detail {
class PowerContext;
}

class FreePowerResult {
 public:
  double T() const { return T_; }
  std::span<const Interval> support_components() const { return support_; }
  std::span<const Atom> atoms() const { return atoms_; }
  std::span<const Interval> bt_components() const { return bt_; }
  std::span<const double> boundary_roots() const { return roots_; }
  // Right edge of the absolutely continuous support, H_T(x4).
  double x3() const { return x3_; }
  // Rightmost root of H_T' (sup B_T).
  double x4() const { return x4_; }
  // Integral of the density over the support (quadrature).
  double ac_mass() const { return ac_mass_; }
  double atomic_mass() const;

  // max{|v| : v in supp mu^{⊞T}}.
  double support_radius() const;
  // Leftmost / rightmost point of the support, atoms included.
  double support_min() const;
  double support_max() const;

  double density(double x) const;
  double cdf(double x) const;
  double quantile(double p) const;
  cplx subordination(double x) const;

 private:
  friend FreePowerResult free_power(const AtomicMeasure& mu, double T);

  double T_ = 1.0;
  std::vector<Interval> support_;
  std::vector<Atom> atoms_;
  std::vector<Interval> bt_;
  std::vector<double> roots_;
  double x3_ = 0.0;
  double x4_ = 0.0;
  double ac_mass_ = 0.0;
  // Cumulative a.c. mass at the end of each quadrature panel, per B_T component.
  std::vector<std::vector<double>> panel_cdf_;
  std::shared_ptr<const detail::PowerContext> ctx_;
};

// H_T(z) and H_T'(z).
HValue h_transform(const AtomicMeasure& mu, double T, cplx z);

// Components of B_T and the real roots of H_T'. Requires variance > 0.
BSet b_set(const AtomicMeasure& mu, double T);

// Height of the boundary of omega_T(C+) above x; 0 outside B_T.
double f_height(const AtomicMeasure& mu, double T, double x);

// Closed a.c. support components (images of the B_T components).
std::vector<Interval> support_components(const AtomicMeasure& mu, double T);

// Atoms of mu^{⊞T}: (T x, T w - (T - 1)) for every atom with w > 1 - 1/T.
std::vector<Atom> atoms_of_power(const AtomicMeasure& mu, double T);

// omega_T(x) for x strictly inside the a.c. support.
cplx subordination(const AtomicMeasure& mu, double T, double x);

// omega_T(z) for z in the upper half-plane.
cplx subordination_complex(const AtomicMeasure& mu, double T, cplx z);

// F_{mu^{⊞T}}(z) = F_mu(omega_T(z)) and its derivative, z in C+.
std::pair<cplx, cplx> power_f_transform(const AtomicMeasure& mu, double T, cplx z);

double density(const AtomicMeasure& mu, double T, double x);

FreePowerResult free_power(const AtomicMeasure& mu, double T);

// max{|v| : v in supp mu^{⊞T}} without the density quadrature.
double power_support_radius(const AtomicMeasure& mu, double T);

}  // namespace fc
