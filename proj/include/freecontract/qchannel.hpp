#pragma once

// Random quantum channels in Stinespring form
//   Phi(X) = Tr_n (V X V*),  V : C^d -> C^k ⊗ C^n a Haar isometry, d = floor(t k n).
// Tensor index convention: basis vector |i> ⊗ |a> sits at row i * n + a.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace fc {

class QuantumState {
 public:
  // Validates Hermiticity, trace 1 and positivity at 1e-10.
  explicit QuantumState(Eigen::MatrixXcd rho);
  static QuantumState maximally_mixed(int dim);
  static QuantumState pure(const Eigen::VectorXcd& psi);

  int dim() const { return static_cast<int>(rho_.rows()); }
  const Eigen::MatrixXcd& matrix() const { return rho_; }
  // Eigenvalues, descending.
  std::vector<double> spectrum() const;

 private:
  Eigen::MatrixXcd rho_;
};

class ChannelInstance {
 public:
  int k() const { return k_; }
  int n() const { return n_; }
  int d() const { return d_; }
  double t_nominal() const { return t_; }
  // d / (k n): the fraction that enters every bound.
  double t_effective() const { return static_cast<double>(d_) / (k_ * n_); }
  std::uint64_t seed() const { return seed_; }
  const Eigen::MatrixXcd& isometry() const { return v_; }

 private:
  friend ChannelInstance random_channel(int k, int n, double t, std::uint64_t seed);
  friend ChannelInstance channel_from_isometry(int k, int n, Eigen::MatrixXcd v);
  int k_ = 0, n_ = 0, d_ = 0;
  double t_ = 0.0;
  std::uint64_t seed_ = 0;
  Eigen::MatrixXcd v_;
};

ChannelInstance random_channel(int k, int n, double t, std::uint64_t seed);
// Wraps a given (kn) x d isometry; throws unless V*V = I within 1e-10.
ChannelInstance channel_from_isometry(int k, int n, Eigen::MatrixXcd v);

QuantumState apply_channel(const ChannelInstance& ch, const QuantumState& x);
// Same with V replaced by its entrywise conjugate.
QuantumState apply_conjugate_channel(const ChannelInstance& ch, const QuantumState& x);
// Tr_k (V X V*): the n x n environment output.
QuantumState apply_complementary_channel(const ChannelInstance& ch, const QuantumState& x);

// Output k x k matrix of Phi on |psi><psi| without forming V X V*.
Eigen::MatrixXcd output_of_pure(const ChannelInstance& ch, const Eigen::VectorXcd& psi);

// (Phi ⊗ conj Phi)(|Omega><Omega|), |Omega> = d^{-1/2} sum_i |ii>, as a state
// on C^k ⊗ C^k (row index i * k + j).
QuantumState bell_output(const ChannelInstance& ch);

// Renyi-p entropy of a probability vector (natural log); p = 1 is the von
// Neumann / Shannon entropy with 0 log 0 = 0. Tiny negative entries from
// rounding are clamped to zero.
double entropy(const std::vector<double>& probs, double p = 1.0);
double entropy(const QuantumState& state, double p = 1.0);

// Binary entropy h(t) = -t log t - (1-t) log(1-t).
double binary_entropy(double t);

// Uniformly random unit vector in C^dim (normalized complex Gaussian).
Eigen::VectorXcd random_pure_vector(int dim, std::uint64_t seed, std::uint64_t stream);

// `count` Haar-random pure inputs; input i uses stream (seed, i). Each row is
// the descending eigenvalue vector of Phi(X).
std::vector<std::vector<double>> sample_output_spectra(const ChannelInstance& ch,
                                                       int count, std::uint64_t seed);

struct ConcentrationStat {
  double max_l2 = 0.0;
  double bound = 0.0;       // t (1 + 2 sqrt((1-t)/(t k))) at t = d/(kn)
  bool regime_ok = true;    // t <= 1 - 1/k
};

ConcentrationStat concentration_stat(const ChannelInstance& ch, int count,
                                     std::uint64_t seed);

struct HminEstimate {
  double entropy = 0.0;
  Eigen::VectorXcd best_input;
};

// Multi-start projected gradient descent for min H(Phi(|psi><psi|)); restart r
// starts from random_pure_vector(d, seed, r), conjugated when searching
// conj Phi. An upper estimate of H^min.
HminEstimate hmin_search(const ChannelInstance& ch, int restarts, std::uint64_t seed,
                         bool conjugate = false);
double hmin_estimate(const ChannelInstance& ch, int restarts, std::uint64_t seed);

}  // namespace fc
