#pragma once

// Finitely atomic measures on the real line and their analytic transforms:
// Cauchy transform G, its reciprocal F, the Nevanlinna measure rho of F and
// the Voiculescu transform.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace fc {

using cplx = std::complex<double>;

struct Atom {
  double x = 0.0;  // position
  double w = 0.0;  // weight, > 0
  friend bool operator==(const Atom&, const Atom&) = default;
};

// Positions closer than this are merged on construction.
inline constexpr double kAtomMergeTol = 1e-12;

class AtomicMeasure {
 public:
  AtomicMeasure() = default;

  // Sorts, merges near-duplicate positions (weights add) and validates.
  // Throws DomainError on empty input, non-finite values or weights <= 0.
  static AtomicMeasure make(std::span<const Atom> atoms);
  static AtomicMeasure make(std::initializer_list<Atom> atoms) {
    return make(std::span<const Atom>(atoms.begin(), atoms.size()));
  }
  // Same as make() but also accepts the empty measure.
  static AtomicMeasure make_positive(std::span<const Atom> atoms);

  std::span<const Atom> atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }
  double total_mass() const { return total_mass_; }
  bool is_probability(double tol = 1e-9) const;

  double min_position() const { return atoms_.front().x; }
  double max_position() const { return atoms_.back().x; }

  friend bool operator==(const AtomicMeasure&, const AtomicMeasure&) = default;

 private:
  std::vector<Atom> atoms_;
  double total_mass_ = 0.0;
};

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

// Mean and variance of a probability measure.
Moments moments(const AtomicMeasure& mu);

struct CauchyPair {
  cplx G;
  cplx F;
};

// G(z) = sum w_i / (z - x_i) and F = 1/G. Defined off the atoms; throws when
// z is real and coincides with an atom.
CauchyPair cauchy_pair(const AtomicMeasure& mu, cplx z);
cplx cauchy_transform(const AtomicMeasure& mu, cplx z);
cplx cauchy_derivative(const AtomicMeasure& mu, cplx z);

// The purely atomic measure rho with
//   F(z) = -mean + z + sum_j c_j / (beta_j - z).
// beta_j are the real zeros of G, one between each pair of consecutive atoms,
// and c_j = -1 / G'(beta_j). rho(R) equals the variance of mu.
AtomicMeasure nevanlinna_rho(const AtomicMeasure& mu);

// F reconstructed from (mean, rho); used to cross-check nevanlinna_rho.
cplx f_from_rho(double mean, const AtomicMeasure& rho, cplx z);

// phi(z) = F^{-1}(z) - z for an arbitrary F transform, by damped Newton from
// w = z. `F` returns (F(w), F'(w)). Throws ConvergenceError when the residual
// |F(w) - z| does not fall below tol within the iteration cap.
using FTransform = std::function<std::pair<cplx, cplx>(cplx)>;
cplx voiculescu_transform(const FTransform& F, cplx z, double tol,
                          int max_iter = 200);
cplx voiculescu_transform(const AtomicMeasure& mu, cplx z, double tol);

struct Eigenvalue {
  double xi = 0.0;  // eigenvalue
  int d = 0;        // multiplicity
  friend bool operator==(const Eigenvalue&, const Eigenvalue&) = default;
};

// Spectrum of a Hermitian a in M_k: distinct eigenvalues with multiplicities.
// Carries the normalized-trace statistics tau(a), sigma(a) and L-/L+.
class HermitianSpec {
 public:
  // Merges equal eigenvalues (within kAtomMergeTol). Throws DomainError unless
  // every multiplicity is positive and they sum to k.
  static HermitianSpec make(int k, std::span<const Eigenvalue> eigs);
  // One eigenvalue per entry (unit multiplicities), k = values.size().
  static HermitianSpec from_values(std::span<const double> values);

  int k() const { return k_; }
  std::span<const Eigenvalue> eigs() const { return eigs_; }
  double tau() const { return tau_; }
  double sigma() const { return sigma_; }
  double variance() const { return sigma_ * sigma_; }
  double lmin() const { return eigs_.front().xi; }
  double lmax() const { return eigs_.back().xi; }
  // Operator norm max |xi_i|.
  double norm() const { return std::max(std::abs(lmin()), std::abs(lmax())); }
  int max_multiplicity() const;

  // mu_a = sum (D_i / k) delta_{xi_i}.
  const AtomicMeasure& measure() const { return measure_; }

  HermitianSpec scaled(double c) const;

  friend bool operator==(const HermitianSpec& l, const HermitianSpec& r) {
    return l.k_ == r.k_ && l.eigs_ == r.eigs_;
  }

 private:
  int k_ = 0;
  std::vector<Eigenvalue> eigs_;
  double tau_ = 0.0;
  double sigma_ = 0.0;
  AtomicMeasure measure_;
};

}  // namespace fc
