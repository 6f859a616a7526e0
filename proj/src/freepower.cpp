#include "freecontract/freepower.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "freecontract/error.hpp"
#include "freecontract/roots.hpp"

namespace fc {

namespace {

constexpr int kPanels = 32;
constexpr double kHalfPi = 0.5 * std::numbers::pi;

void check_T(double T) {
  if (!std::isfinite(T) || T < 1.0) {
    throw DomainError("free power: T must be finite and >= 1 (got " +
                      std::to_string(T) + ")");
  }
}

// Adaptive Gauss-Kronrod. Next to a component edge the boundary height is
// only known to ~1e-16 in f^2, so the integrand is noisy on a tiny angle
// range; intervals below kMinWidth are accepted as they stand.
constexpr double kMinWidth = 1e-9;

double integrate(auto&& f, double a, double b, double abs_tol = 1e-14, int depth = 0) {
  using boost::math::quadrature::gauss_kronrod;
  if (!(b > a)) return 0.0;
  double err = 0.0, l1 = 0.0;
  const double r = gauss_kronrod<double, 31>::integrate(f, a, b, 0, 0.0, &err, &l1);
  err *= l1;  // reported relative to the L1 norm
  if (err <= std::max(abs_tol, 1e-12 * l1) || b - a < kMinWidth || depth >= 50) {
    return r;
  }
  const double m = 0.5 * (a + b);
  return integrate(f, a, m, 0.5 * abs_tol, depth + 1) +
         integrate(f, m, b, 0.5 * abs_tol, depth + 1);
}

}  // namespace

namespace detail {

// Precomputed data for one (mu, T) pair with T > 1 and variance > 0.
class PowerContext {
 public:
  PowerContext(const AtomicMeasure& mu, double T) : mu_(mu), T_(T) {
    check_T(T);
    if (!(T > 1.0)) throw DomainError("free power: T must exceed 1 here");
    const auto m = moments(mu);
    mean_ = m.mean;
    sigma_ = std::sqrt(m.variance);
    rho_ = nevanlinna_rho(mu);
    if (rho_.empty()) {
      throw DomainError(
          "free power: variance is zero (point mass); B_T is empty");
    }
    threshold_ = 1.0 / (T - 1.0);
    build_bset();
    build_support();
  }

  const AtomicMeasure& mu() const { return mu_; }
  double T() const { return T_; }
  const BSet& bset() const { return bset_; }
  const std::vector<Interval>& support() const { return support_; }

  HValue h(cplx z) const {
    cplx sum = 0.0, dsum = 0.0;
    for (const auto& a : rho_.atoms()) {
      const cplx d = z - a.x;
      if (d == 0.0) {
        throw DomainError("H_T: z coincides with a rho atom at " +
                          std::to_string(a.x));
      }
      const cplx inv = 1.0 / d;
      sum += a.w * inv;
      dsum += a.w * inv * inv;
    }
    return {z + (T_ - 1.0) * (mean_ + sum), 1.0 - (T_ - 1.0) * dsum};
  }

  // sum_j c_j / (x - beta_j)^2 and its derivative.
  double s(double x) const {
    double r = 0.0;
    for (const auto& a : rho_.atoms()) {
      const double d = x - a.x;
      r += a.w / (d * d);
    }
    return r;
  }
  double ds(double x) const {
    double r = 0.0;
    for (const auto& a : rho_.atoms()) {
      const double d = x - a.x;
      r -= 2.0 * a.w / (d * d * d);
    }
    return r;
  }

  double height(double x) const {
    if (!(s(x) > threshold_)) return 0.0;
    // Solve sum c_j / (d_j^2 + s) = 1/(T-1) in s = y^2.
    return solve_height([&](double sq, double& dg) {
      double v = 0.0, dv = 0.0;
      for (const auto& a : rho_.atoms()) {
        const double d = x - a.x;
        const double den = d * d + sq;
        v += a.w / den;
        dv -= a.w / (den * den);
      }
      dg = dv;
      return v - threshold_;
    });
  }

  // Height at u = edge + delta for a B_T endpoint `edge`, with the threshold
  // replaced by sum_j c_j / (edge - beta_j)^2 so that the height vanishes
  // exactly at the endpoint and f^2 keeps its relative accuracy next to it.
  double height_near(double edge, double delta) const {
    const double u = edge + delta;
    auto g = [&](double sq, double& dg) {
      double v = 0.0, dv = 0.0;
      for (const auto& a : rho_.atoms()) {
        const double d = u - a.x;
        const double de = edge - a.x;
        const double den = d * d + sq;
        v += a.w * (-delta * (de + d) - sq) / (den * de * de);
        dv -= a.w / (den * den);
      }
      dg = dv;
      return v;
    };
    double dg = 0.0;
    if (!(g(0.0, dg) > 0.0)) return 0.0;
    return solve_height(g);
  }

  // Root in s >= 0 of a convex decreasing g with g(0) > 0. Newton from the
  // left is monotone; the bracket guards the start next to a pole.
  template <class G>
  double solve_height(G&& g) const {
    double lo = 0.0;
    double hi = (T_ - 1.0) * rho_.total_mass();
    double sq = 0.0;
    double dg = 0.0;
    double gv = g(sq, dg);
    if (!std::isfinite(gv)) {
      sq = 0.5 * hi;
      gv = g(sq, dg);
    }
    for (int it = 0; it < 200; ++it) {
      if (gv > 0.0) lo = sq; else hi = sq;
      double next = sq - gv / dg;
      if (!(next > lo && next < hi) || !std::isfinite(next)) {
        next = 0.5 * (lo + hi);
      }
      if (std::abs(next - sq) <= 4e-16 * std::max(next, 1e-300) ||
          hi - lo <= 4e-16 * hi) {
        sq = next;
        break;
      }
      sq = next;
      gv = g(sq, dg);
      if (gv == 0.0) break;
    }
    return std::sqrt(std::max(sq, 0.0));
  }

  cplx boundary_point(double u) const { return {u, height(u)}; }

  // Real part of H_T on the boundary curve; increasing in u.
  double psi(double u) const { return h(boundary_point(u)).H.real(); }

  cplx omega(double x) const {
    for (std::size_t i = 0; i < support_.size(); ++i) {
      if (!support_[i].contains_open(x)) continue;
      const auto& src = sources_[i];
      auto f = [&](double u) { return psi(u) - x; };
      const double u = roots::brent(f, src.lo, src.hi, support_[i].lo - x,
                                    support_[i].hi - x);
      const cplx w = boundary_point(u);
      const double res = std::abs(h(w).H - x);
      if (!(res < 1e-9 * std::max(1.0, std::abs(x)))) {
        throw ConvergenceError("subordination: residual " + std::to_string(res) +
                               " above tolerance at x = " + std::to_string(x));
      }
      return w;
    }
    throw DomainError("subordination: x = " + std::to_string(x) +
                      " is not inside the absolutely continuous support");
  }

  double density(double x) const {
    for (const auto& c : support_) {
      if (c.contains_open(x)) {
        const cplx w = omega(x);
        return std::max(0.0, -cauchy_transform(mu_, w).imag() / std::numbers::pi);
      }
    }
    return 0.0;
  }

  // Mass of mu^{⊞T} carried by the image of part of B_T component j, with
  // u = lo + (hi - lo) sin^2(theta). On the curve omega = u + i y the density
  // is (y / pi) sum_i w_i / |omega - xi_i|^2, and differentiating
  // psi(u) = u + (T-1)(mean + sum_j c_j d_j / D_j), D_j = d_j^2 + y^2, under
  // sum_j c_j / D_j = 1/(T-1) gives psi' = 2 (T-1) (y^2 A + B^2 / A) with
  // A = sum_j c_j / D_j^2 and B = sum_j c_j d_j / D_j^2. Both are sums of
  // positive terms.
  double bt_integral(std::size_t j, double th0, double th1) const {
    const auto& c = bset_.components[j];
    const double len = c.length();
    auto integrand = [&](double th) {
      const double s1 = std::sin(th), c1 = std::cos(th);
      const bool left = th < 0.25 * std::numbers::pi;
      const double delta = left ? len * s1 * s1 : -len * c1 * c1;
      const double u = (left ? c.lo : c.hi) + delta;
      const double y = height_near(left ? c.lo : c.hi, delta);
      if (!(y > 0.0)) return 0.0;
      const double sq = y * y;
      double A = 0.0, B = 0.0;
      for (const auto& a : rho_.atoms()) {
        const double d = u - a.x;
        const double D = d * d + sq;
        A += a.w / (D * D);
        B += a.w * d / (D * D);
      }
      const double dpsi = 2.0 * (T_ - 1.0) * (sq * A + B * B / A);
      double g = 0.0;
      for (const auto& a : mu_.atoms()) {
        const double d = u - a.x;
        g += a.w / (d * d + sq);
      }
      return y * g / std::numbers::pi * dpsi * 2.0 * len * s1 * c1;
    };
    return integrate(integrand, th0, th1);
  }

  // Image of B_T component j under the boundary map.
  Interval bt_image(std::size_t j) const {
    const auto& c = bset_.components[j];
    return {h(c.lo).H.real(), h(c.hi).H.real()};
  }

 private:
  void build_bset() {
    const auto rho = rho_.atoms();
    const double reach = sigma_ * std::sqrt(T_ - 1.0) + 1.0;
    auto excess = [&](double x) { return s(x) - threshold_; };
    std::vector<double> roots;

    // Left of the first pole s increases from 0 to +inf.
    roots.push_back(roots::bisect(excess, rho.front().x - reach, rho.front().x));
    for (std::size_t j = 0; j + 1 < rho.size(); ++j) {
      const double a = rho[j].x, b = rho[j + 1].x;
      // s is convex between poles; locate its minimum through the sign of s'.
      const double xmin = roots::bisect([&](double x) { return ds(x); }, a, b);
      if (excess(xmin) < 0.0) {
        roots.push_back(roots::bisect(excess, xmin, a));
        roots.push_back(roots::bisect(excess, xmin, b));
      }
    }
    roots.push_back(roots::bisect(excess, rho.back().x + reach, rho.back().x));

    bset_.boundary_roots = roots;
    for (std::size_t i = 0; i + 1 < roots.size(); i += 2) {
      bset_.components.push_back({roots[i], roots[i + 1]});
    }
  }

  void build_support() {
    for (const auto& c : bset_.components) {
      const Interval img{h(c.lo).H.real(), h(c.hi).H.real()};
      if (!support_.empty() && img.lo - support_.back().hi <= kComponentMergeTol) {
        // H_T is real and increasing across the gap, so the hull of the
        // sources still brackets the boundary map.
        support_.back().hi = img.hi;
        sources_.back().hi = c.hi;
        continue;
      }
      support_.push_back(img);
      sources_.push_back(c);
    }
  }

  AtomicMeasure mu_;
  double T_;
  double mean_ = 0.0;
  double sigma_ = 0.0;
  AtomicMeasure rho_;
  double threshold_ = 0.0;
  BSet bset_;
  std::vector<Interval> support_;
  std::vector<Interval> sources_;  // hull of the B_T components per support component
};

}  // namespace detail
}  // namespace fc

namespace fc {

namespace {

struct HSystem {
  double T;
  double mean;
  AtomicMeasure rho;

  HSystem(const AtomicMeasure& mu, double T_) : T(T_) {
    check_T(T_);
    mean = moments(mu).mean;
    rho = nevanlinna_rho(mu);
  }

  HValue eval(cplx z) const {
    cplx sum = 0.0, dsum = 0.0;
    for (const auto& a : rho.atoms()) {
      const cplx d = z - a.x;
      if (d == 0.0) {
        throw DomainError("H_T: z coincides with a rho atom at " +
                          std::to_string(a.x));
      }
      const cplx inv = 1.0 / d;
      sum += a.w * inv;
      dsum += a.w * inv * inv;
    }
    return {z + (T - 1.0) * (mean + sum), 1.0 - (T - 1.0) * dsum};
  }
};

}  // namespace

HValue h_transform(const AtomicMeasure& mu, double T, cplx z) {
  return HSystem(mu, T).eval(z);
}

BSet b_set(const AtomicMeasure& mu, double T) {
  return detail::PowerContext(mu, T).bset();
}

double f_height(const AtomicMeasure& mu, double T, double x) {
  check_T(T);
  if (T == 1.0 || mu.size() < 2) return 0.0;
  return detail::PowerContext(mu, T).height(x);
}

std::vector<Interval> support_components(const AtomicMeasure& mu, double T) {
  return detail::PowerContext(mu, T).support();
}

std::vector<Atom> atoms_of_power(const AtomicMeasure& mu, double T) {
  check_T(T);
  std::vector<Atom> out;
  if (T == 1.0) {
    out.assign(mu.atoms().begin(), mu.atoms().end());
    return out;
  }
  for (const auto& a : mu.atoms()) {
    if (a.w > 1.0 - 1.0 / T) out.push_back({T * a.x, T * a.w - (T - 1.0)});
  }
  return out;
}

cplx subordination(const AtomicMeasure& mu, double T, double x) {
  return detail::PowerContext(mu, T).omega(x);
}

cplx subordination_complex(const AtomicMeasure& mu, double T, cplx z) {
  if (!(z.imag() > 0.0)) {
    throw DomainError("subordination_complex: z must lie in the upper half-plane");
  }
  const HSystem sys(mu, T);
  const double tol = 1e-14 * std::max(1.0, std::abs(z));

  // Any solution of H_T(w) = z with Im w > 0 is omega_T(z), since H_T is
  // one-to-one on the preimage of the upper half-plane.
  auto newton = [&](cplx w, int iters) {
    double res = std::abs(sys.eval(w).H - z);
    for (int it = 0; it < iters && res > tol; ++it) {
      const auto hv = sys.eval(w);
      const cplx step = (hv.H - z) / hv.Hprime;
      double lambda = 1.0;
      bool moved = false;
      for (int halve = 0; halve < 40; ++halve) {
        const cplx cand = w - lambda * step;
        if (cand.imag() > 0.0) {
          const double r = std::abs(sys.eval(cand).H - z);
          if (r < res) {
            w = cand;
            res = r;
            moved = true;
            break;
          }
        }
        lambda *= 0.5;
      }
      if (!moved) break;
    }
    return std::pair{w, res};
  };

  auto [w, res] = newton(z - (T - 1.0) * sys.mean, 100);
  if (res <= tol) return w;

  // Fallback: the fixed-point map w -> (z + (T - 1) F_mu(w)) / T converges on
  // the upper half-plane (Denjoy-Wolff point).
  w = cplx(z.real(), z.imag() + 1.0);
  for (int it = 0; it < 100000; ++it) {
    const cplx f = f_from_rho(sys.mean, sys.rho, w);
    const cplx next = (z + (T - 1.0) * f) / T;
    const bool done = std::abs(next - w) < 1e-10 * std::max(1.0, std::abs(w));
    w = next;
    if (done) break;
  }
  std::tie(w, res) = newton(w, 100);
  if (res > 1e-9 * std::max(1.0, std::abs(z))) {
    throw ConvergenceError("subordination_complex: no convergence at z");
  }
  return w;
}

std::pair<cplx, cplx> power_f_transform(const AtomicMeasure& mu, double T, cplx z) {
  const cplx w = subordination_complex(mu, T, z);
  const cplx g = cauchy_transform(mu, w);
  const cplx dg = cauchy_derivative(mu, w);
  const cplx hprime = HSystem(mu, T).eval(w).Hprime;
  return {1.0 / g, (-dg / (g * g)) / hprime};
}

double density(const AtomicMeasure& mu, double T, double x) {
  check_T(T);
  if (T == 1.0 || mu.size() < 2) return 0.0;
  return detail::PowerContext(mu, T).density(x);
}

FreePowerResult free_power(const AtomicMeasure& mu, double T) {
  check_T(T);
  if (!mu.is_probability()) {
    throw DomainError("free power: input must be a probability measure");
  }
  FreePowerResult r;
  r.T_ = T;
  if (T == 1.0) {
    r.atoms_.assign(mu.atoms().begin(), mu.atoms().end());
    r.x3_ = r.x4_ = mu.max_position();
    return r;
  }
  if (mu.size() == 1) {
    const double c = mu.atoms().front().x;
    r.atoms_ = {{T * c, 1.0}};
    r.x3_ = T * c;
    r.x4_ = c;
    return r;
  }

  auto ctx = std::make_shared<const detail::PowerContext>(mu, T);
  r.bt_ = ctx->bset().components;
  r.roots_ = ctx->bset().boundary_roots;
  r.support_ = ctx->support();
  r.atoms_ = atoms_of_power(mu, T);
  r.x4_ = r.roots_.back();
  r.x3_ = ctx->h(r.x4_).H.real();

  double total = 0.0;
  for (std::size_t j = 0; j < r.bt_.size(); ++j) {
    std::vector<double> cum(kPanels);
    double acc = 0.0;
    for (int p = 0; p < kPanels; ++p) {
      acc += ctx->bt_integral(j, kHalfPi * p / kPanels, kHalfPi * (p + 1) / kPanels);
      cum[p] = acc;
    }
    total += acc;
    r.panel_cdf_.push_back(std::move(cum));
  }
  r.ac_mass_ = total;
  r.ctx_ = std::move(ctx);
  return r;
}

double power_support_radius(const AtomicMeasure& mu, double T) {
  check_T(T);
  double r = 0.0;
  for (const auto& a : atoms_of_power(mu, T)) r = std::max(r, std::abs(a.x));
  if (T > 1.0 && mu.size() > 1) {
    const detail::PowerContext ctx(mu, T);
    const auto& sup = ctx.support();
    r = std::max({r, std::abs(sup.front().lo), std::abs(sup.back().hi)});
  }
  return r;
}

double FreePowerResult::atomic_mass() const {
  double m = 0.0;
  for (const auto& a : atoms_) m += a.w;
  return m;
}

double FreePowerResult::support_min() const {
  double v = std::numeric_limits<double>::infinity();
  if (!support_.empty()) v = support_.front().lo;
  for (const auto& a : atoms_) v = std::min(v, a.x);
  return v;
}

double FreePowerResult::support_max() const {
  double v = -std::numeric_limits<double>::infinity();
  if (!support_.empty()) v = support_.back().hi;
  for (const auto& a : atoms_) v = std::max(v, a.x);
  return v;
}

double FreePowerResult::support_radius() const {
  return std::max(std::abs(support_min()), std::abs(support_max()));
}

double FreePowerResult::density(double x) const {
  return ctx_ ? ctx_->density(x) : 0.0;
}

cplx FreePowerResult::subordination(double x) const {
  if (!ctx_) {
    throw DomainError("subordination: measure has no absolutely continuous part");
  }
  return ctx_->omega(x);
}

double FreePowerResult::cdf(double x) const {
  double c = 0.0;
  for (const auto& a : atoms_) {
    if (a.x <= x) c += a.w;
  }
  for (std::size_t j = 0; j < bt_.size(); ++j) {
    const auto img = ctx_->bt_image(j);
    if (x <= img.lo) continue;
    if (x >= img.hi) {
      c += panel_cdf_[j].back();
      continue;
    }
    const auto& src = bt_[j];
    const double u = std::clamp(ctx_->omega(x).real(), src.lo, src.hi);
    const double th = std::asin(std::sqrt((u - src.lo) / src.length()));
    const int p = std::min(kPanels - 1, static_cast<int>(th / kHalfPi * kPanels));
    const double start = kHalfPi * p / kPanels;
    c += (p > 0 ? panel_cdf_[j][p - 1] : 0.0) + ctx_->bt_integral(j, start, th);
  }
  return std::clamp(c, 0.0, 1.0);
}

double FreePowerResult::quantile(double p) const {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile: p must lie in [0, 1]");
  double lo = support_min(), hi = support_max();
  if (cdf(lo) >= p) return lo;
  // Safeguarded Newton on cdf(x) = p; the density is the derivative.
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi)); ++it) {
    const double c = cdf(x);
    if (c < p) lo = x; else hi = x;
    if (std::abs(c - p) <= 1e-14) return x;
    const double d = density(x);
    double next = d > 0.0 ? x - (c - p) / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    x = next;
  }
  return hi;
}

}  // namespace fc
