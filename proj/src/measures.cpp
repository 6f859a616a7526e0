#include "freecontract/measures.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "freecontract/error.hpp"
#include "freecontract/roots.hpp"

namespace fc {

namespace {

std::vector<Atom> normalize_atoms(std::span<const Atom> input) {
  for (const auto& a : input) {
    if (!std::isfinite(a.x) || !std::isfinite(a.w)) {
      throw DomainError("measure: atom position and weight must be finite");
    }
    if (!(a.w > 0.0)) {
      throw DomainError("measure: atom weights must be positive (got " +
                        std::to_string(a.w) + ")");
    }
  }
  std::vector<Atom> sorted(input.begin(), input.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const Atom& l, const Atom& r) { return l.x < r.x; });
  std::vector<Atom> merged;
  merged.reserve(sorted.size());
  for (const auto& a : sorted) {
    if (!merged.empty() && a.x - merged.back().x <= kAtomMergeTol) {
      merged.back().w += a.w;
    } else {
      merged.push_back(a);
    }
  }
  return merged;
}

}  // namespace

AtomicMeasure AtomicMeasure::make(std::span<const Atom> atoms) {
  if (atoms.empty()) throw DomainError("measure: no atoms given");
  return make_positive(atoms);
}

AtomicMeasure AtomicMeasure::make_positive(std::span<const Atom> atoms) {
  AtomicMeasure m;
  m.atoms_ = normalize_atoms(atoms);
  double total = 0.0;
  for (const auto& a : m.atoms_) total += a.w;
  m.total_mass_ = total;
  return m;
}

bool AtomicMeasure::is_probability(double tol) const {
  return !atoms_.empty() && std::abs(total_mass_ - 1.0) <= tol;
}

Moments moments(const AtomicMeasure& mu) {
  if (!mu.is_probability()) {
    throw DomainError("moments: measure must have total mass 1 (got " +
                      std::to_string(mu.total_mass()) + ")");
  }
  double mean = 0.0;
  for (const auto& a : mu.atoms()) mean += a.w * a.x;
  // Centered second moment; algebraically equal to sum w x^2 - mean^2.
  double var = 0.0;
  for (const auto& a : mu.atoms()) var += a.w * (a.x - mean) * (a.x - mean);
  return {mean, std::max(var, 0.0)};
}

cplx cauchy_transform(const AtomicMeasure& mu, cplx z) {
  cplx g = 0.0;
  for (const auto& a : mu.atoms()) {
    const cplx d = z - a.x;
    if (d == 0.0) {
      throw DomainError("cauchy transform: z coincides with an atom at " +
                        std::to_string(a.x));
    }
    g += a.w / d;
  }
  return g;
}

cplx cauchy_derivative(const AtomicMeasure& mu, cplx z) {
  cplx g = 0.0;
  for (const auto& a : mu.atoms()) {
    const cplx d = z - a.x;
    if (d == 0.0) {
      throw DomainError("cauchy transform: z coincides with an atom at " +
                        std::to_string(a.x));
    }
    g -= a.w / (d * d);
  }
  return g;
}

CauchyPair cauchy_pair(const AtomicMeasure& mu, cplx z) {
  const cplx g = cauchy_transform(mu, z);
  return {g, 1.0 / g};
}

AtomicMeasure nevanlinna_rho(const AtomicMeasure& mu) {
  if (!mu.is_probability()) {
    throw DomainError("nevanlinna_rho: input must be a probability measure");
  }
  const auto atoms = mu.atoms();
  std::vector<Atom> rho;
  rho.reserve(atoms.size());

  // On the real line G is strictly decreasing between consecutive poles,
  // running from +inf to -inf, so each gap holds exactly one zero.
  auto real_g = [&](double x) {
    double g = 0.0;
    for (const auto& a : atoms) g += a.w / (x - a.x);
    return g;
  };
  auto real_dg = [&](double x) {
    double g = 0.0;
    for (const auto& a : atoms) g -= a.w / ((x - a.x) * (x - a.x));
    return g;
  };

  for (std::size_t i = 0; i + 1 < atoms.size(); ++i) {
    const double lo = atoms[i].x;
    const double hi = atoms[i + 1].x;
    // Bisect on the open interval; the sign test is exact even next to poles.
    double a = lo, b = hi;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (a + b);
      if (mid <= a || mid >= b) break;
      if (b - a <= 1e-13) break;
      const double g = real_g(mid);
      if (g == 0.0) {
        a = b = mid;
        break;
      }
      if (g > 0.0) a = mid; else b = mid;
    }
    double beta = 0.5 * (a + b);
    // Newton polish, kept inside the final bracket.
    for (int it = 0; it < 3; ++it) {
      const double step = real_g(beta) / real_dg(beta);
      const double next = beta - step;
      if (!(next >= a && next <= b) || step == 0.0) break;
      beta = next;
    }
    const double c = -1.0 / real_dg(beta);
    rho.push_back({beta, c});
  }
  return AtomicMeasure::make_positive(rho);
}

cplx f_from_rho(double mean, const AtomicMeasure& rho, cplx z) {
  cplx f = z - mean;
  for (const auto& a : rho.atoms()) f += a.w / (a.x - z);
  return f;
}

cplx voiculescu_transform(const FTransform& F, cplx z, double tol,
                          int max_iter) {
  if (!(tol > 0.0)) throw DomainError("voiculescu_transform: tol must be > 0");
  cplx w = z;
  auto [fw, dfw] = F(w);
  double res = std::abs(fw - z);
  for (int it = 0; it < max_iter && res >= tol; ++it) {
    const cplx step = (fw - z) / dfw;
    double lambda = 1.0;
    bool improved = false;
    for (int halve = 0; halve < 40; ++halve) {
      const cplx cand = w - lambda * step;
      if (cand.imag() > 0.0) {
        auto [fc, dfc] = F(cand);
        const double r = std::abs(fc - z);
        if (r < res) {
          w = cand;
          fw = fc;
          dfw = dfc;
          res = r;
          improved = true;
          break;
        }
      }
      lambda *= 0.5;
    }
    if (!improved) break;
  }
  if (!(res < tol)) {
    throw ConvergenceError(
        "voiculescu_transform: Newton did not converge; z is likely outside "
        "the region where F is invertible");
  }
  return w - z;
}

cplx voiculescu_transform(const AtomicMeasure& mu, cplx z, double tol) {
  if (!mu.is_probability()) {
    throw DomainError("voiculescu_transform: input must be a probability measure");
  }
  FTransform F = [&mu](cplx w) {
    const cplx g = cauchy_transform(mu, w);
    const cplx dg = cauchy_derivative(mu, w);
    return std::pair<cplx, cplx>{1.0 / g, -dg / (g * g)};
  };
  return voiculescu_transform(F, z, tol);
}

}  // namespace fc

namespace fc {

HermitianSpec HermitianSpec::make(int k, std::span<const Eigenvalue> eigs) {
  if (k < 1) throw DomainError("spec: dimension k must be >= 1");
  if (eigs.empty()) throw DomainError("spec: no eigenvalues given");
  std::vector<Eigenvalue> sorted(eigs.begin(), eigs.end());
  long total = 0;
  for (const auto& e : sorted) {
    if (!std::isfinite(e.xi)) throw DomainError("spec: eigenvalues must be finite");
    if (e.d < 1) throw DomainError("spec: multiplicities must be >= 1");
    total += e.d;
  }
  if (total != k) {
    throw DomainError("spec: multiplicities sum to " + std::to_string(total) +
                      " but k = " + std::to_string(k));
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const Eigenvalue& l, const Eigenvalue& r) { return l.xi < r.xi; });
  HermitianSpec s;
  s.k_ = k;
  for (const auto& e : sorted) {
    if (!s.eigs_.empty() && e.xi - s.eigs_.back().xi <= kAtomMergeTol) {
      s.eigs_.back().d += e.d;
    } else {
      s.eigs_.push_back(e);
    }
  }
  std::vector<Atom> atoms;
  atoms.reserve(s.eigs_.size());
  for (const auto& e : s.eigs_) {
    atoms.push_back({e.xi, static_cast<double>(e.d) / k});
  }
  s.measure_ = AtomicMeasure::make(atoms);
  const auto m = moments(s.measure_);
  s.tau_ = m.mean;
  s.sigma_ = std::sqrt(m.variance);
  return s;
}

HermitianSpec HermitianSpec::from_values(std::span<const double> values) {
  std::vector<Eigenvalue> eigs;
  eigs.reserve(values.size());
  for (double v : values) eigs.push_back({v, 1});
  return make(static_cast<int>(values.size()), eigs);
}

int HermitianSpec::max_multiplicity() const {
  int m = 0;
  for (const auto& e : eigs_) m = std::max(m, e.d);
  return m;
}

HermitianSpec HermitianSpec::scaled(double c) const {
  std::vector<Eigenvalue> e(eigs_);
  for (auto& v : e) v.xi *= c;
  return make(k_, e);
}

}  // namespace fc
