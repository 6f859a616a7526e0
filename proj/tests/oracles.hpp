#pragma once

// Test-only reference computations, independent of the library's boundary
// root-finding route.

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include "freecontract/measures.hpp"

namespace oracle {

using cplx = std::complex<double>;

// omega_T(x + i y_final) by Newton continuation along z = x + i y, y shrinking
// geometrically from a large value where omega ~ z - (T-1) mean.
inline std::optional<cplx> omega_by_continuation(const fc::AtomicMeasure& mu, double T,
                                                 double x, double y_final) {
  double mean = 0.0;
  for (const auto& a : mu.atoms()) mean += a.w * a.x;
  auto F = [&](cplx w, cplx& dF) {
    cplx g = 0.0, dg = 0.0;
    for (const auto& a : mu.atoms()) {
      g += a.w / (w - a.x);
      dg -= a.w / ((w - a.x) * (w - a.x));
    }
    dF = -dg / (g * g);
    return 1.0 / g;
  };
  double y = 50.0;
  cplx w(x - (T - 1.0) * mean, y);
  while (true) {
    const cplx z(x, y);
    for (int it = 0; it < 100; ++it) {
      cplx dF;
      const cplx Fw = F(w, dF);
      const cplx H = T * w + (1.0 - T) * Fw;
      const cplx dH = T + (1.0 - T) * dF;
      cplx step = (H - z) / dH;
      // Stay in the upper half-plane.
      while ((w - step).imag() <= 0.0) step *= 0.5;
      w -= step;
      if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(w))) break;
    }
    if (y <= y_final) break;
    y = std::max(y * 0.9, y_final);
  }
  cplx dF;
  const cplx H = T * w + (1.0 - T) * F(w, dF);
  if (std::abs(H - cplx(x, y_final)) > 1e-8) return std::nullopt;
  return w;
}

// Density of mu^{⊞T} smoothed at height y: -Im G_mu(omega_T(x + i y)) / pi.
inline std::optional<double> smoothed_density(const fc::AtomicMeasure& mu, double T,
                                              double x, double y) {
  const auto w = omega_by_continuation(mu, T, x, y);
  if (!w) return std::nullopt;
  cplx g = 0.0;
  for (const auto& a : mu.atoms()) g += a.w / (*w - a.x);
  return -g.imag() / std::numbers::pi;
}

// Bernoulli 1/2(delta_-1 + delta_1): on the boundary |omega|^2 = T - 1 and
// H_T(omega) = 2 Re omega, so omega_T(x) = x/2 + i sqrt(T - 1 - x^2/4).
inline cplx bernoulli_omega(double T, double x) {
  return {0.5 * x, std::sqrt(std::max(0.0, T - 1.0 - 0.25 * x * x))};
}

inline double bernoulli_density(double T, double x) {
  if (std::abs(x) >= 2.0 * std::sqrt(T - 1.0)) return 0.0;
  const cplx w = bernoulli_omega(T, x);
  return -(w / (w * w - 1.0)).imag() / std::numbers::pi;
}

// Composite midpoint rule in theta for x = lo + (hi - lo) sin^2 theta.
template <class F>
double midpoint_mass(F&& density, double lo, double hi, int n) {
  const double h = 0.5 * std::numbers::pi / n;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double th = (i + 0.5) * h;
    const double x = lo + (hi - lo) * std::sin(th) * std::sin(th);
    s += density(x) * 2.0 * (hi - lo) * std::sin(th) * std::cos(th) * h;
  }
  return s;
}

// 2-8 atoms at uniform positions in [-3, 3] with normalized random weights.
inline fc::AtomicMeasure random_measure(std::mt19937_64& gen) {
  std::uniform_int_distribution<int> count(2, 8);
  std::uniform_real_distribution<double> pos(-3.0, 3.0), wt(0.05, 1.0);
  std::vector<fc::Atom> atoms(count(gen));
  double total = 0.0;
  for (auto& a : atoms) {
    a = {pos(gen), wt(gen)};
    total += a.w;
  }
  for (auto& a : atoms) a.w /= total;
  return fc::AtomicMeasure::make(atoms);
}

// Nonnegative spectrum: k in [2, 12], 1..6 distinct eigenvalues in [0, 5]
// with random multiplicities summing to k.
inline fc::HermitianSpec random_nonneg_spec(std::mt19937_64& gen) {
  const int k = std::uniform_int_distribution<int>(2, 12)(gen);
  const int m = std::uniform_int_distribution<int>(1, std::min(k, 6))(gen);
  std::uniform_real_distribution<double> pos(0.0, 5.0);
  std::vector<fc::Eigenvalue> eigs(m);
  for (auto& e : eigs) e = {pos(gen), 1};
  for (int extra = k - m; extra > 0; --extra)
    ++eigs[std::uniform_int_distribution<int>(0, m - 1)(gen)].d;
  return fc::HermitianSpec::make(k, eigs);
}

}  // namespace oracle
