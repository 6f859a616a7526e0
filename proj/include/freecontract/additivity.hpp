#pragma once

// Closed-form analysis of minimum-output-entropy additivity violation for
// random channels with t = k^{-r}: the gap
//   g(k, r) = 2(1-t) log k + h(t) - 2 f(k, t)
// between the Bell-state upper bound on H^min(Phi ⊗ conj Phi) and twice the
// Taylor lower bound f(k, t) on H^min(Phi). g < 0 certifies violation.

#include <optional>
#include <vector>

#include "freecontract/qchannel.hpp"

namespace fc {

// a + b - 2ab + 2 sqrt(ab(1-a)(1-b)), clamped to [0, 1].
double phi_overlap(double a, double b);

// Eigenvalue window for a unit vector at overlap t with the maximally mixed
// direction. Past the turning point the edges saturate: l = 0 for t >= 1/k,
// u = 1 for t >= (k-1)/k.
struct SimplexBounds {
  double l = 0.0;  // 1 - phi((k-1)/k, t)
  double u = 0.0;  // phi(1/k, t)
};
SimplexBounds simplex_bounds(int k, double t);

// log k - [k/2 + (u - 1/k) / (6 l^2)] t^2 [1 + 2 sqrt((1-t)/(t k))]^2.
// Throws DomainError when l = 0 (e.g. t = 1/k).
double taylor_lower_f(int k, double t);

// 2(1-t) log k + h(t). Throws DomainError when t < k^{-2}.
double product_bound(int k, double t);

struct ViolationReport {
  int k = 0;
  double r = 0.0;
  double t = 0.0;
  double g = 0.0;
  double product_bound = 0.0;  // 2(1-t) log k + h(t)
  double single_lower = 0.0;   // f(k, t)
  bool violated = false;       // g < 0
};

// Evaluated in extended precision with compensated summation; |g| near the
// headline point is ~1e-12 against terms of size ~1e-5 after the exact
// cancellation of the 2 log k pair.
ViolationReport gap_g(int k, double r);

struct ScanCell {
  int k = 0;
  double r = 0.0;
  double t = 0.0;
  std::optional<double> g;  // empty where f is undefined
};

struct ScanSummary {
  std::vector<ScanCell> cells;  // k-major, r-minor
  // Smallest grid k with some g(k, r) < 0, and its minimizing r.
  std::optional<int> min_violating_k;
  double argmin_r = 0.0;
  double g_at_min = 0.0;
  // Integer bisection between the last clean grid k and min_violating_k,
  // each k judged by its minimum over the r grid.
  std::optional<int> refined_min_k;
  double refined_r = 0.0;
  double refined_g = 0.0;
};

// k_points log-spaced integers in [kmin, kmax] (deduplicated), r from rmin in
// steps of rstep while r < rmax.
std::vector<int> log_spaced_k(double kmin, double kmax, int k_points);
std::vector<double> r_grid(double rmin, double rmax, double rstep);
ScanSummary scan_violation(const std::vector<int>& ks, const std::vector<double>& rs,
                           bool refine = true);

struct HastingsGap {
  double lhs = 0.0;  // log k - H(X)
  double rhs = 0.0;  // k Tr (X - I/k)^2
};
HastingsGap hastings_gap(const QuantumState& state);

}  // namespace fc
