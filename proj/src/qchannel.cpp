#include "freecontract/qchannel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "freecontract/error.hpp"
#include "freecontract/parallel.hpp"
#include "freecontract/random.hpp"
#include "freecontract/rmt_oracle.hpp"

namespace fc {

namespace {

using RowMajorMatrixXcd =
    Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr double kStateTol = 1e-10;
constexpr double kBellEntryCap = 4e7;

// v in C^k ⊗ C^n viewed as the k x n matrix M(i, a) = v(i n + a).
Eigen::MatrixXcd reshape_kn(const Eigen::VectorXcd& v, int k, int n) {
  return Eigen::Map<const RowMajorMatrixXcd>(v.data(), k, n);
}

Eigen::MatrixXcd pure_output(const Eigen::MatrixXcd& v, int k, int n,
                             const Eigen::VectorXcd& psi) {
  const Eigen::MatrixXcd m = reshape_kn(v * psi, k, n);
  return m * m.adjoint();
}

Eigen::MatrixXcd partial_trace_env(const Eigen::MatrixXcd& y, int k, int n) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      out(i, j) = y.block(i * n, j * n, n, n).trace();
    }
  }
  return out;
}

Eigen::MatrixXcd partial_trace_out(const Eigen::MatrixXcd& y, int k, int n) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < k; ++i) out += y.block(i * n, i * n, n, n);
  return out;
}

void check_input(const ChannelInstance& ch, const QuantumState& x) {
  if (x.dim() != ch.d()) {
    throw DomainError("channel input has dimension " + std::to_string(x.dim()) +
                      ", expected d = " + std::to_string(ch.d()));
  }
}

std::vector<double> descending_eigenvalues(const Eigen::MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  std::vector<double> ev(es.eigenvalues().data(),
                         es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(ev.begin(), ev.end(), std::greater<>());
  return ev;
}

}  // namespace

QuantumState::QuantumState(Eigen::MatrixXcd rho) {
  if (rho.rows() != rho.cols() || rho.rows() == 0) {
    throw DomainError("state: matrix must be square and nonempty");
  }
  if (!rho.allFinite()) throw DomainError("state: entries must be finite");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > kStateTol) {
    throw DomainError("state: matrix is not Hermitian");
  }
  if (std::abs(rho.trace() - std::complex<double>(1.0)) > kStateTol) {
    throw DomainError("state: trace differs from 1");
  }
  rho_ = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kStateTol) {
    throw DomainError("state: matrix is not positive semidefinite");
  }
}

QuantumState QuantumState::maximally_mixed(int dim) {
  if (dim < 1) throw DomainError("state: dimension must be >= 1");
  return QuantumState(Eigen::MatrixXcd::Identity(dim, dim) / static_cast<double>(dim));
}

QuantumState QuantumState::pure(const Eigen::VectorXcd& psi) {
  const double norm = psi.norm();
  if (!(norm > 0.0)) throw DomainError("state: zero vector");
  const Eigen::VectorXcd u = psi / norm;
  return QuantumState(u * u.adjoint());
}

std::vector<double> QuantumState::spectrum() const {
  return descending_eigenvalues(rho_);
}

ChannelInstance random_channel(int k, int n, double t, std::uint64_t seed) {
  if (k < 1 || n < 1) throw DomainError("random_channel: k and n must be >= 1");
  if (!(t > 0.0 && t <= 1.0)) throw DomainError("random_channel: t must lie in (0, 1]");
  const int d = static_cast<int>(std::floor(t * k * n + 1e-9));
  if (d < 1) throw DomainError("random_channel: floor(t k n) = 0");
  ChannelInstance ch;
  ch.k_ = k;
  ch.n_ = n;
  ch.d_ = d;
  ch.t_ = t;
  ch.seed_ = seed;
  ch.v_ = haar_isometry(k * n, d, seed);
  return ch;
}

ChannelInstance channel_from_isometry(int k, int n, Eigen::MatrixXcd v) {
  if (k < 1 || n < 1 || v.rows() != static_cast<Eigen::Index>(k) * n || v.cols() < 1 ||
      v.cols() > v.rows()) {
    throw DomainError("channel_from_isometry: V must be (kn) x d with 1 <= d <= kn");
  }
  const Eigen::MatrixXcd gram = v.adjoint() * v;
  if ((gram - Eigen::MatrixXcd::Identity(v.cols(), v.cols())).cwiseAbs().maxCoeff() >
      kStateTol) {
    throw DomainError("channel_from_isometry: V*V differs from the identity");
  }
  ChannelInstance ch;
  ch.k_ = k;
  ch.n_ = n;
  ch.d_ = static_cast<int>(v.cols());
  ch.t_ = ch.t_effective();
  ch.v_ = std::move(v);
  return ch;
}

QuantumState apply_channel(const ChannelInstance& ch, const QuantumState& x) {
  check_input(ch, x);
  const auto& v = ch.isometry();
  return QuantumState(partial_trace_env(v * x.matrix() * v.adjoint(), ch.k(), ch.n()));
}

QuantumState apply_conjugate_channel(const ChannelInstance& ch, const QuantumState& x) {
  check_input(ch, x);
  const Eigen::MatrixXcd vb = ch.isometry().conjugate();
  return QuantumState(partial_trace_env(vb * x.matrix() * vb.adjoint(), ch.k(), ch.n()));
}

QuantumState apply_complementary_channel(const ChannelInstance& ch,
                                         const QuantumState& x) {
  check_input(ch, x);
  const auto& v = ch.isometry();
  return QuantumState(partial_trace_out(v * x.matrix() * v.adjoint(), ch.k(), ch.n()));
}

Eigen::MatrixXcd output_of_pure(const ChannelInstance& ch, const Eigen::VectorXcd& psi) {
  if (psi.size() != ch.d()) throw DomainError("output_of_pure: input dimension mismatch");
  return pure_output(ch.isometry(), ch.k(), ch.n(), psi.normalized());
}

QuantumState bell_output(const ChannelInstance& ch) {
  const int k = ch.k(), n = ch.n(), d = ch.d();
  const double entries = static_cast<double>(k) * k * n * n;
  if (entries > kBellEntryCap) {
    throw DomainError("bell_output: k^2 n^2 = " + std::to_string(entries) +
                      " exceeds the resource guard");
  }
  // Row (i, j) of M holds vec(V_i V_j^*) / sqrt(d), V_i the n x d block of
  // rows i n .. i n + n - 1; the output is M M^*.
  const auto& v = ch.isometry();
  Eigen::MatrixXcd m(k * k, n * n);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      const Eigen::MatrixXcd block =
          v.middleRows(i * n, n) * v.middleRows(j * n, n).adjoint();
      m.row(i * k + j) = Eigen::Map<const Eigen::VectorXcd>(block.data(), n * n);
    }
  }
  m /= std::sqrt(static_cast<double>(d));
  return QuantumState(m * m.adjoint());
}

double entropy(const std::vector<double>& probs, double p) {
  if (!(p > 0.0) || !std::isfinite(p)) {
    throw DomainError("entropy: order p must be positive and finite");
  }
  if (p == 1.0) {
    double h = 0.0;
    for (double x : probs) {
      if (x > 0.0) h -= x * std::log(x);
    }
    return h;
  }
  double s = 0.0;
  for (double x : probs) {
    if (x > 0.0) s += std::pow(x, p);
  }
  return std::log(s) / (1.0 - p);
}

double entropy(const QuantumState& state, double p) {
  return entropy(state.spectrum(), p);
}

double binary_entropy(double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("binary_entropy: t must lie in [0, 1]");
  double h = 0.0;
  if (t > 0.0) h -= t * std::log(t);
  if (t < 1.0) h -= (1.0 - t) * std::log1p(-t);
  return h;
}

Eigen::VectorXcd random_pure_vector(int dim, std::uint64_t seed, std::uint64_t stream) {
  if (dim < 1) throw DomainError("random_pure_vector: dimension must be >= 1");
  auto gen = rng::stream(seed, stream);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXcd psi(dim);
  for (int i = 0; i < dim; ++i) {
    const double re = normal(gen);
    const double im = normal(gen);
    psi(i) = {re, im};
  }
  return psi / psi.norm();
}

std::vector<std::vector<double>> sample_output_spectra(const ChannelInstance& ch,
                                                       int count, std::uint64_t seed) {
  if (count < 1) throw DomainError("sample_output_spectra: count must be >= 1");
  std::vector<std::vector<double>> out(count);
  parallel_for(static_cast<std::size_t>(count), [&](std::size_t i) {
    const auto psi = random_pure_vector(ch.d(), seed, i);
    out[i] = descending_eigenvalues(pure_output(ch.isometry(), ch.k(), ch.n(), psi));
  });
  return out;
}

ConcentrationStat concentration_stat(const ChannelInstance& ch, int count,
                                     std::uint64_t seed) {
  if (count < 1) throw DomainError("concentration_stat: count must be >= 1");
  const int k = ch.k();
  const double t = ch.t_effective();
  ConcentrationStat cs;
  cs.bound = t * (1.0 + 2.0 * std::sqrt((1.0 - t) / (t * k)));
  cs.regime_ok = t <= 1.0 - 1.0 / k + 1e-12;
  const Eigen::MatrixXcd mixed = Eigen::MatrixXcd::Identity(k, k) / static_cast<double>(k);
  std::vector<double> dist(count);
  parallel_for(static_cast<std::size_t>(count), [&](std::size_t i) {
    const auto psi = random_pure_vector(ch.d(), seed, i);
    dist[i] = (pure_output(ch.isometry(), k, ch.n(), psi) - mixed).norm();
  });
  cs.max_l2 = *std::max_element(dist.begin(), dist.end());
  return cs;
}

HminEstimate hmin_search(const ChannelInstance& ch, int restarts, std::uint64_t seed,
                         bool conjugate) {
  if (restarts < 1) throw DomainError("hmin_estimate: restarts must be >= 1");
  const int k = ch.k(), n = ch.n(), d = ch.d();
  const Eigen::MatrixXcd v = conjugate ? Eigen::MatrixXcd(ch.isometry().conjugate())
                                       : ch.isometry();

  auto objective = [&](const Eigen::VectorXcd& psi) {
    return entropy(descending_eigenvalues(pure_output(v, k, n, psi)));
  };
  // Wirtinger gradient of H(Tr_n |V psi><V psi|): V* ((-log rho - I) ⊗ I_n) V psi.
  auto gradient = [&](const Eigen::VectorXcd& psi) {
    const Eigen::VectorXcd vpsi = v * psi;
    const Eigen::MatrixXcd m = reshape_kn(vpsi, k, n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m * m.adjoint());
    Eigen::VectorXd lg = es.eigenvalues().unaryExpr(
        [](double x) { return -std::log(std::max(x, 1e-16)) - 1.0; });
    const Eigen::MatrixXcd l = es.eigenvectors() * lg.asDiagonal() *
                               es.eigenvectors().adjoint();
    const RowMajorMatrixXcd lm = l * m;
    const Eigen::VectorXcd lv = Eigen::Map<const Eigen::VectorXcd>(lm.data(), k * n);
    return Eigen::VectorXcd(v.adjoint() * lv);
  };

  HminEstimate best;
  best.entropy = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    Eigen::VectorXcd psi = random_pure_vector(d, seed, static_cast<std::uint64_t>(r));
    // conj Phi(conj X) = conj Phi(X): mirrored starts give mirrored runs.
    if (conjugate) psi = psi.conjugate().eval();
    double f = objective(psi);
    double step = 0.1;
    for (int it = 0; it < 500; ++it) {
      Eigen::VectorXcd g = gradient(psi);
      g -= psi * psi.dot(g);  // tangent to the sphere
      if (g.norm() < 1e-12) break;
      bool accepted = false;
      while (step > 1e-14) {
        Eigen::VectorXcd cand = psi - step * g;
        cand.normalize();
        const double fc = objective(cand);
        if (fc < f) {
          const double gain = f - fc;
          psi = cand;
          f = fc;
          step *= 2.0;
          accepted = true;
          if (gain < 1e-15) it = 500;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) break;
    }
    if (f < best.entropy) {
      best.entropy = f;
      best.best_input = psi;
    }
  }
  return best;
}

double hmin_estimate(const ChannelInstance& ch, int restarts, std::uint64_t seed) {
  return hmin_search(ch, restarts, seed).entropy;
}

}  // namespace fc
