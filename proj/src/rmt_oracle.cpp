#include "freecontract/rmt_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "freecontract/error.hpp"
#include "freecontract/random.hpp"

namespace fc {

Eigen::MatrixXcd haar_isometry(int N, int cols, std::uint64_t seed) {
  if (N < 1 || cols < 1 || cols > N) {
    throw DomainError("haar_isometry: need 1 <= cols <= N");
  }
  auto gen = rng::stream(seed, 0);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXcd g(N, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < N; ++i) {
      const double re = normal(gen);
      const double im = normal(gen);
      g(i, j) = {re, im};
    }
  }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(N, cols);
  const auto& r = qr.matrixQR();
  for (int j = 0; j < cols; ++j) {
    const std::complex<double> d = r(j, j);
    const double mag = std::abs(d);
    if (mag > 0.0) q.col(j) *= d / mag;
  }
  return q;
}

Eigen::MatrixXcd haar_unitary(int N, std::uint64_t seed) {
  return haar_isometry(N, N, seed);
}

std::vector<int> apportion(const HermitianSpec& spec, int N) {
  const auto eigs = spec.eigs();
  std::vector<int> counts(eigs.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  int used = 0;
  for (std::size_t i = 0; i < eigs.size(); ++i) {
    const double quota = static_cast<double>(eigs[i].d) * N / spec.k();
    counts[i] = static_cast<int>(std::floor(quota));
    used += counts[i];
    remainders.push_back({quota - counts[i], i});
  }
  // Largest remainder first; ties go to the lower index.
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& l, const auto& r) { return l.first > r.first; });
  for (std::size_t j = 0; used < N; ++j, ++used) {
    ++counts[remainders[j % remainders.size()].second];
  }
  return counts;
}

CompressionSample compressed_spectrum(const HermitianSpec& spec, double t, int N,
                                      std::uint64_t seed) {
  if (!(t > 0.0 && t <= 1.0)) throw DomainError("compressed_spectrum: t must lie in (0, 1]");
  if (N < 1) throw DomainError("compressed_spectrum: N must be positive");
  const int m = static_cast<int>(std::floor(t * N + 1e-9));
  if (m < 1) throw DomainError("compressed_spectrum: floor(tN) = 0");

  const auto counts = apportion(spec, N);
  Eigen::VectorXd diag(N);
  int pos = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    for (int c = 0; c < counts[i]; ++c) diag(pos++) = spec.eigs()[i].xi;
  }
  const Eigen::MatrixXcd w = haar_isometry(N, m, seed);
  Eigen::MatrixXcd compressed = w.adjoint() * diag.asDiagonal() * w;
  compressed = 0.5 * (compressed + compressed.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(compressed, Eigen::EigenvaluesOnly);

  CompressionSample s;
  s.N = N;
  s.t = t;
  s.seed = seed;
  s.eigenvalues.resize(m);
  for (int i = 0; i < m; ++i) s.eigenvalues[i] = es.eigenvalues()(i) / t;
  std::sort(s.eigenvalues.begin(), s.eigenvalues.end());
  return s;
}

double ks_distance(const std::vector<double>& sorted_values,
                   const FreePowerResult& result) {
  const std::size_t n = sorted_values.size();
  if (n == 0) throw DomainError("ks_distance: empty sample");
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = sorted_values[i];
    const double F = result.cdf(x);
    // Left limit: drop any atom sitting exactly at x.
    double F_left = F;
    for (const auto& a : result.atoms()) {
      if (a.x == x) F_left -= a.w;
    }
    d = std::max({d, static_cast<double>(i + 1) / n - F,
                  F_left - static_cast<double>(i) / n});
  }
  return d;
}

double ks_distance(const CompressionSample& sample, const FreePowerResult& result) {
  if (std::abs(result.T() * sample.t - 1.0) > 1e-9) {
    throw DomainError("ks_distance: power T = " + std::to_string(result.T()) +
                      " does not match 1/t = " + std::to_string(1.0 / sample.t));
  }
  return ks_distance(sample.eigenvalues, result);
}

}  // namespace fc
