#include "freecontract/tnorm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "freecontract/error.hpp"
#include "freecontract/freepower.hpp"
#include "freecontract/random.hpp"

namespace fc {

namespace {

void check_t(double t) {
  if (!std::isfinite(t) || !(t > 0.0) || t > 1.0) {
    throw DomainError("t must lie in (0, 1] (got " + std::to_string(t) + ")");
  }
}

// |t L± ± 2 sigma sqrt(t(1-t)) + (1-t) tau|, the two edges t x1(1/t), t x2(1/t).
double edge_expression(const HermitianSpec& spec, double t) {
  const double spread = 2.0 * spec.sigma() * std::sqrt(t * (1.0 - t));
  const double shift = (1.0 - t) * spec.tau();
  return std::max(std::abs(t * spec.lmax() + spread + shift),
                  std::abs(t * spec.lmin() - spread + shift));
}

void check_simplex(std::span<const double> p, const char* what) {
  double sum = 0.0;
  for (double v : p) {
    if (!std::isfinite(v) || v < -1e-9) {
      throw DomainError(std::string(what) + ": entries must be nonnegative");
    }
    sum += v;
  }
  if (p.empty() || std::abs(sum - 1.0) > 1e-9) {
    throw DomainError(std::string(what) + ": entries must sum to 1");
  }
}

}  // namespace

double tnorm_exact(const HermitianSpec& spec, double t) {
  check_t(t);
  return t * power_support_radius(spec.measure(), 1.0 / t);
}

Interval support_bounds(const AtomicMeasure& mu, double T) {
  if (!std::isfinite(T) || T < 1.0) throw DomainError("support_bounds: T must be >= 1");
  const auto m = moments(mu);
  const double spread = 2.0 * std::sqrt(m.variance * (T - 1.0));
  const double shift = (T - 1.0) * m.mean;
  return {mu.min_position() - spread + shift, mu.max_position() + spread + shift};
}

UpperBound upper_bound(const HermitianSpec& spec, double t) {
  check_t(t);
  UpperBound ub;
  const double expr = edge_expression(spec, t);
  ub.bound = ub.bound_abs = expr;
  const double cut = spec.k() * (1.0 - t);
  if (spec.max_multiplicity() > cut) {
    ub.atom_dominated = true;
    double xi_i0 = -std::numeric_limits<double>::infinity();
    double xi_abs = 0.0;
    for (const auto& e : spec.eigs()) {
      if (e.d > cut) {
        xi_i0 = std::max(xi_i0, e.xi);
        xi_abs = std::max(xi_abs, std::abs(e.xi));
      }
    }
    ub.bound = std::max(xi_i0, expr);
    ub.bound_abs = std::max(xi_abs, expr);
  }
  return ub;
}

double lower_bound(const HermitianSpec& spec, double t, double L) {
  check_t(t);
  if (spec.lmin() < 0.0) {
    throw DomainError("lower_bound: requires a >= 0 (smallest eigenvalue " +
                      std::to_string(spec.lmin()) + ")");
  }
  if (!std::isfinite(L) || L < spec.lmax()) {
    throw DomainError("lower_bound: L must be >= ||a|| = " +
                      std::to_string(spec.lmax()));
  }
  const double s = spec.sigma();
  const double r = s * std::sqrt(1.0 / t - 1.0);
  const double eps = (r > 0.0) ? r / (L + r) : 0.0;
  return spec.tau() + (1.0 + eps) * s * std::sqrt(t * (1.0 - t)) -
         t * (L + spec.tau());
}

double kargin_bound(const HermitianSpec& spec, double t) {
  check_t(t);
  const double n = std::round(1.0 / t);
  if (std::abs(n - 1.0 / t) > 1e-9 * n) {
    throw DomainError("kargin_bound: only stated for t = 1/n (got 1/t = " +
                      std::to_string(1.0 / t) + ")");
  }
  const double var = spec.variance();
  if (!(var > 0.0)) {
    throw DomainError("kargin_bound: undefined for zero variance");
  }
  const double dev = std::max(std::abs(spec.lmax() - spec.tau()),
                              std::abs(spec.lmin() - spec.tau()));
  return spec.tau() + 2.0 * std::sqrt(t) * spec.sigma() +
         5.0 * t * dev * dev * dev / var;
}

double superconvergence_asymptote(const HermitianSpec& spec, double t) {
  check_t(t);
  return spec.tau() + 2.0 * std::sqrt(t) * spec.sigma();
}

TNormReport tnorm_report(const HermitianSpec& spec, double t) {
  TNormReport r;
  r.t = t;
  r.exact = tnorm_exact(spec, t);
  const auto ub = upper_bound(spec, t);
  r.upper_thm = ub.bound;
  r.upper_thm_abs = ub.bound_abs;
  r.atom_dominated = ub.atom_dominated;
  if (spec.lmin() >= 0.0) r.lower_thm = lower_bound(spec, t, spec.lmax());
  const double n = std::round(1.0 / t);
  if (std::abs(n - 1.0 / t) <= 1e-9 * n && spec.variance() > 0.0) {
    r.kargin = kargin_bound(spec, t);
  }
  r.asymptote = superconvergence_asymptote(spec, t);
  return r;
}

MembershipResult kkt_membership(std::span<const double> lambda, double t,
                                std::span<const std::vector<double>> probes,
                                double tol) {
  check_t(t);
  check_simplex(lambda, "kkt_membership lambda");
  MembershipResult out;
  out.worst_margin = -std::numeric_limits<double>::infinity();
  for (const auto& a : probes) {
    if (a.size() != lambda.size()) {
      throw DomainError("kkt_membership: probe dimension differs from lambda");
    }
    check_simplex(a, "kkt_membership probe");
    double dot = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) dot += lambda[i] * a[i];
    const double margin = dot - tnorm_exact(HermitianSpec::from_values(a), t);
    if (margin > out.worst_margin) {
      out.worst_margin = margin;
      out.worst_probe = a;
    }
  }
  out.member = out.worst_margin <= tol;
  return out;
}

std::vector<std::vector<double>> default_probes(int k, std::uint64_t seed,
                                                int dirichlet_count) {
  if (k < 1) throw DomainError("default_probes: k must be >= 1");
  std::vector<std::vector<double>> probes;
  const double u = 1.0 / k;
  for (int i = 0; i < k; ++i) {
    std::vector<double> v(k, 0.0);
    v[i] = 1.0;
    probes.push_back(v);
  }
  // u + s (e_i - u) for s = 1/2 (toward e_i) and s = -1/(k-1) (the face
  // opposite e_i), both inside the simplex.
  if (k > 1) {
    for (int i = 0; i < k; ++i) {
      for (double s : {0.5, -1.0 / (k - 1)}) {
        std::vector<double> v(k);
        for (int j = 0; j < k; ++j) v[j] = u + s * ((j == i ? 1.0 : 0.0) - u);
        for (double& x : v) x = std::max(x, 0.0);
        probes.push_back(v);
      }
    }
  }
  auto gen = rng::stream(seed, 0);
  std::exponential_distribution<double> expo(1.0);
  for (int n = 0; n < dirichlet_count; ++n) {
    std::vector<double> v(k);
    double sum = 0.0;
    for (double& x : v) sum += (x = expo(gen));
    for (double& x : v) x /= sum;
    probes.push_back(v);
  }
  return probes;
}

}  // namespace fc
