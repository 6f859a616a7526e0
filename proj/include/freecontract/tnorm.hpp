#pragma once

// The free contraction norm ||a||_(t) = ||p_t a p_t|| of a Hermitian a in M_k,
// with p_t a trace-t projection free from M_k. Since t^{-1} p_t a p_t has
// distribution mu_a^{⊞1/t}, the exact value is t times the support radius of
// that power. Closed-form estimates are provided alongside for comparison.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "freecontract/freepower.hpp"
#include "freecontract/measures.hpp"

namespace fc {

double tnorm_exact(const HermitianSpec& spec, double t);

// [x1(T), x2(T)] = [L- - 2 sigma sqrt(T-1) + (T-1) tau, L+ + 2 sigma sqrt(T-1) + (T-1) tau],
// an interval containing the a.c. support of mu^{⊞T}.
Interval support_bounds(const AtomicMeasure& mu, double T);

struct UpperBound {
  // max{ xi_i0, |t L± ± 2 sigma sqrt(t(1-t)) + (1-t) tau| } as stated, with
  // the signed xi_i0 when the largest multiplicity exceeds k(1-t).
  double bound = 0.0;
  // Same with |xi| over every eigenvalue whose multiplicity exceeds k(1-t);
  // this is the form that bounds the norm for negative dominant atoms.
  double bound_abs = 0.0;
  bool atom_dominated = false;
};

UpperBound upper_bound(const HermitianSpec& spec, double t);

// tau + (1 + eps) sigma sqrt(t(1-t)) - t (L + tau),
// eps = sigma sqrt(1/t - 1) / (L + sigma sqrt(1/t - 1)). Requires a >= 0 and
// L >= ||a||.
double lower_bound(const HermitianSpec& spec, double t, double L);

// tau + 2 sqrt(t) sigma + 5 t ||a - tau||^3 / sigma^2, only for t = 1/n.
double kargin_bound(const HermitianSpec& spec, double t);

// tau + 2 sqrt(t) sigma.
double superconvergence_asymptote(const HermitianSpec& spec, double t);

struct TNormReport {
  double t = 0.0;
  double exact = 0.0;
  double upper_thm = 0.0;
  double upper_thm_abs = 0.0;
  std::optional<double> lower_thm;  // a >= 0 only, with L = ||a||
  std::optional<double> kargin;     // 1/t integral and sigma > 0 only
  double asymptote = 0.0;
  bool atom_dominated = false;
};

TNormReport tnorm_report(const HermitianSpec& spec, double t);

struct MembershipResult {
  bool member = true;
  double worst_margin = 0.0;
  std::vector<double> worst_probe;
};

// Probe test of lambda in K_{k,t} = {lambda : <lambda, a> <= ||a||_(t) for all
// a in the simplex}. A positive margin certifies non-membership; membership is
// only as good as the probe set.
MembershipResult kkt_membership(std::span<const double> lambda, double t,
                                std::span<const std::vector<double>> probes,
                                double tol = 1e-9);

// Vertices, +/- perturbations of the uniform point toward each vertex, and
// `dirichlet_count` flat-Dirichlet samples from stream (seed, 0).
std::vector<std::vector<double>> default_probes(int k, std::uint64_t seed,
                                                int dirichlet_count = 200);

}  // namespace fc
