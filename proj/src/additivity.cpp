#include "freecontract/additivity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "freecontract/error.hpp"
#include "freecontract/parallel.hpp"

namespace fc {

namespace {

using real = long double;

// Neumaier's compensated sum.
class CompensatedSum {
 public:
  void add(real x) {
    const real t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  real value() const { return sum_ + comp_; }

 private:
  real sum_ = 0.0L;
  real comp_ = 0.0L;
};

real phi_ext(real a, real b) {
  const real v = a + b - 2.0L * a * b + 2.0L * std::sqrt(a * b * (1.0L - a) * (1.0L - b));
  return std::clamp(v, 0.0L, 1.0L);
}

void check_unit(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw DomainError(std::string("phi_overlap: ") + name + " must lie in [0, 1]");
  }
}

// Lower edge 1 - phi((k-1)/k, t), written as (sqrt(1-t) - sqrt(t(k-1)))^2 / k
// to avoid the cancellation near t = 1/k. With sin^2 a = (k-1)/k and
// sin^2 b = t, phi = sin^2(a + b); once a + b reaches pi/2 (t >= 1/k) the
// bound is 0. Differences at the level of double rounding of t count as 0.
real lower_edge(real k, real t) {
  const real a = std::sqrt(1.0L - t);
  const real b = std::sqrt(t * (k - 1.0L));
  const real diff = a - b;
  if (diff <= 4.0L * std::numeric_limits<double>::epsilon() * b) return 0.0L;
  return diff * diff / k;
}

// Upper edge phi(1/k, t), saturating at 1 once t >= (k-1)/k.
real upper_edge(real k, real t) {
  if (t >= (k - 1.0L) / k) return 1.0L;
  return phi_ext(1.0L / k, t);
}

struct FParts {
  real log_k;
  real correction;  // [k/2 + (u - 1/k)/(6 l^2)] t^2 [1 + 2 sqrt((1-t)/(tk))]^2
};

FParts f_parts(int k, real t) {
  if (k < 2) throw DomainError("taylor_lower_f: k must be >= 2");
  if (!(t > 0.0L && t <= 1.0L)) throw DomainError("taylor_lower_f: t must lie in (0, 1]");
  const real kk = k;
  const real l = lower_edge(kk, t);
  const real u = upper_edge(kk, t);
  if (!(l > 0.0L)) {
    throw DomainError("taylor_lower_f: l_{k,t} = 0 at k = " + std::to_string(k) +
                      ", t = " + std::to_string(static_cast<double>(t)));
  }
  const real radius = 1.0L + 2.0L * std::sqrt((1.0L - t) / (t * kk));
  const real coeff = kk / 2.0L + (u - 1.0L / kk) / (6.0L * l * l);
  return {std::log(kk), coeff * t * t * radius * radius};
}

real binary_entropy_ext(real t) {
  real h = 0.0L;
  if (t > 0.0L) h -= t * std::log(t);
  if (t < 1.0L) h -= (1.0L - t) * std::log1p(-t);
  return h;
}

}  // namespace

double phi_overlap(double a, double b) {
  check_unit(a, "a");
  check_unit(b, "b");
  return static_cast<double>(phi_ext(a, b));
}

SimplexBounds simplex_bounds(int k, double t) {
  if (k < 2) throw DomainError("simplex_bounds: k must be >= 2");
  if (!(t > 0.0 && t <= 1.0)) throw DomainError("simplex_bounds: t must lie in (0, 1]");
  const real kk = k;
  return {static_cast<double>(lower_edge(kk, t)),
          static_cast<double>(upper_edge(kk, t))};
}

double taylor_lower_f(int k, double t) {
  const auto p = f_parts(k, t);
  return static_cast<double>(p.log_k - p.correction);
}

double product_bound(int k, double t) {
  if (k < 1) throw DomainError("product_bound: k must be >= 1");
  if (!(t > 0.0 && t <= 1.0)) throw DomainError("product_bound: t must lie in (0, 1]");
  if (t < 1.0 / (static_cast<double>(k) * k)) {
    throw DomainError("product_bound: requires t >= k^-2");
  }
  const real lk = std::log(static_cast<real>(k));
  return static_cast<double>(2.0L * (1.0L - t) * lk + binary_entropy_ext(t));
}

ViolationReport gap_g(int k, double r) {
  if (k < 2) throw DomainError("gap_g: k must be >= 2");
  if (!(r >= 1.0 && r < 2.0)) throw DomainError("gap_g: r must lie in [1, 2)");
  const real t = std::pow(static_cast<real>(k), -static_cast<real>(r));
  const auto f = f_parts(k, t);
  const real h = binary_entropy_ext(t);

  // g = [2 log k - 2 t log k + h] - 2 [log k - correction], summed term by term
  // from the smallest magnitude up.
  std::vector<real> terms = {2.0L * f.log_k, -2.0L * t * f.log_k, h,
                             -2.0L * f.log_k, 2.0L * f.correction};
  std::sort(terms.begin(), terms.end(),
            [](real a, real b) { return std::fabs(a) < std::fabs(b); });
  CompensatedSum g;
  for (real x : terms) g.add(x);

  ViolationReport rep;
  rep.k = k;
  rep.r = r;
  rep.t = static_cast<double>(t);
  rep.g = static_cast<double>(g.value());
  rep.product_bound = static_cast<double>(2.0L * (1.0L - t) * f.log_k + h);
  rep.single_lower = static_cast<double>(f.log_k - f.correction);
  rep.violated = rep.g < 0.0;
  return rep;
}

std::vector<int> log_spaced_k(double kmin, double kmax, int k_points) {
  if (!(kmin >= 2.0) || !(kmax >= kmin) || k_points < 1) {
    throw DomainError("scan: need 2 <= kmin <= kmax and at least one k point");
  }
  std::vector<int> ks;
  for (int i = 0; i < k_points; ++i) {
    const double frac = k_points == 1 ? 0.0 : static_cast<double>(i) / (k_points - 1);
    const double v = kmin * std::pow(kmax / kmin, frac);
    const int k = static_cast<int>(std::lround(v));
    if (ks.empty() || k != ks.back()) ks.push_back(k);
  }
  return ks;
}

std::vector<double> r_grid(double rmin, double rmax, double rstep) {
  if (!(rmin >= 1.0) || !(rmax <= 2.0) || !(rmax > rmin) || !(rstep > 0.0)) {
    throw DomainError("scan: need 1 <= rmin < rmax <= 2 and rstep > 0");
  }
  std::vector<double> rs;
  // Index-based to avoid drift; values are rounded to the step's decimal grid.
  for (long i = 0;; ++i) {
    const double r = rmin + static_cast<double>(i) * rstep;
    if (r >= rmax - 1e-12 * rstep) break;
    rs.push_back(r);
  }
  return rs;
}

namespace {

struct RowMin {
  std::optional<double> g;
  double r = 0.0;
};

RowMin min_over_r(int k, const std::vector<double>& rs, std::vector<ScanCell>* row) {
  RowMin best;
  for (double r : rs) {
    ScanCell cell{k, r, std::pow(static_cast<double>(k), -r), std::nullopt};
    try {
      cell.g = gap_g(k, r).g;
    } catch (const DomainError&) {
    }
    if (cell.g && (!best.g || *cell.g < *best.g)) {
      best.g = cell.g;
      best.r = r;
    }
    if (row) row->push_back(cell);
  }
  return best;
}

}  // namespace

ScanSummary scan_violation(const std::vector<int>& ks, const std::vector<double>& rs,
                           bool refine) {
  ScanSummary out;
  std::vector<std::vector<ScanCell>> rows(ks.size());
  std::vector<RowMin> mins(ks.size());
  parallel_for(ks.size(), [&](std::size_t i) { mins[i] = min_over_r(ks[i], rs, &rows[i]); });
  for (auto& row : rows) {
    out.cells.insert(out.cells.end(), row.begin(), row.end());
  }
  std::optional<std::size_t> first;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (mins[i].g && *mins[i].g < 0.0) {
      first = i;
      break;
    }
  }
  if (!first) return out;
  out.min_violating_k = ks[*first];
  out.argmin_r = mins[*first].r;
  out.g_at_min = *mins[*first].g;
  out.refined_min_k = ks[*first];
  out.refined_r = out.argmin_r;
  out.refined_g = out.g_at_min;
  if (!refine || *first == 0) return out;

  // Invariant: lo does not violate, hi does.
  int lo = ks[*first - 1], hi = ks[*first];
  RowMin hi_min = mins[*first];
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    const auto m = min_over_r(mid, rs, nullptr);
    if (m.g && *m.g < 0.0) {
      hi = mid;
      hi_min = m;
    } else {
      lo = mid;
    }
  }
  out.refined_min_k = hi;
  out.refined_r = hi_min.r;
  out.refined_g = *hi_min.g;
  return out;
}

HastingsGap hastings_gap(const QuantumState& state) {
  const int k = state.dim();
  const auto ev = state.spectrum();
  double tr = 0.0;
  for (double x : ev) tr += (x - 1.0 / k) * (x - 1.0 / k);
  return {std::log(static_cast<double>(k)) - entropy(ev), k * tr};
}

}  // namespace fc
