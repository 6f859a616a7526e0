#pragma once

// Finite-N stand-in for p_t a p_t: a diagonal N x N matrix with the spectrum
// of a, compressed by the first floor(tN) columns of a Haar unitary.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "freecontract/freepower.hpp"
#include "freecontract/measures.hpp"

namespace fc {

// First `cols` columns of a Haar unitary on C^N: thin QR of an N x cols
// complex Ginibre matrix (filled column-major from stream (seed, 0)) with the
// phases of diag(R) moved into Q. Column-nested, so
// haar_isometry(N, m, s) equals the first m columns of haar_unitary(N, s).
Eigen::MatrixXcd haar_isometry(int N, int cols, std::uint64_t seed);
Eigen::MatrixXcd haar_unitary(int N, std::uint64_t seed);

struct CompressionSample {
  int N = 0;
  double t = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> eigenvalues;  // ascending, length floor(tN)
};

// Largest-remainder apportionment of D_i N / k into exactly N slots.
std::vector<int> apportion(const HermitianSpec& spec, int N);

// Eigenvalues of t^{-1} W* A W, W the first floor(tN) Haar columns.
CompressionSample compressed_spectrum(const HermitianSpec& spec, double t, int N,
                                      std::uint64_t seed);

// sup_x |F_sample(x) - F(x)| with F the CDF of `result`. The power must be
// T = 1/t of the sample.
double ks_distance(const CompressionSample& sample, const FreePowerResult& result);

// Same statistic for an arbitrary sorted sample against `result`.
double ks_distance(const std::vector<double>& sorted_values,
                   const FreePowerResult& result);

}  // namespace fc
