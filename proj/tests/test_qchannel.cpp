#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "freecontract/additivity.hpp"
#include "freecontract/error.hpp"
#include "freecontract/qchannel.hpp"
#include "freecontract/random.hpp"
#include "freecontract/tnorm.hpp"

using namespace fc;

namespace {

using Mat = Eigen::MatrixXcd;

// Reference partial trace over the second factor, written with explicit
// Kronecker bookkeeping: (A)_{(i,a),(j,b)} -> sum_a A_{(i,a),(j,a)}.
Mat trace_out_second(const Mat& a, int k, int n) {
  Mat out = Mat::Zero(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      for (int c = 0; c < n; ++c) out(i, j) += a(i * n + c, j * n + c);
  return out;
}

Mat trace_out_first(const Mat& a, int k, int n) {
  Mat out = Mat::Zero(n, n);
  for (int c = 0; c < n; ++c)
    for (int e = 0; e < n; ++e)
      for (int i = 0; i < k; ++i) out(c, e) += a(i * n + c, i * n + e);
  return out;
}

QuantumState random_mixed(int d, std::uint64_t seed) {
  auto gen = rng::stream(seed, 0);
  std::normal_distribution<double> nd;
  Mat g(d, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) g(i, j) = {nd(gen), nd(gen)};
  Mat rho = g * g.adjoint();
  rho /= rho.trace().real();
  return QuantumState(rho);
}

std::vector<double> nonzero_sorted(std::vector<double> v, double cut = 1e-12) {
  std::vector<double> out;
  for (double x : v)
    if (x > cut) out.push_back(x);
  std::sort(out.begin(), out.end());
  return out;
}

double l2_to_mixed(const Mat& x) {
  const int k = static_cast<int>(x.rows());
  const Mat diff = x - Mat::Identity(k, k) / static_cast<double>(k);
  return std::sqrt((diff * diff).trace().real());
}

}  // namespace

TEST_CASE("random_channel shape and determinism") {
  const auto ch = random_channel(3, 8, 0.25, 7);
  CHECK(ch.d() == 6);
  CHECK(ch.isometry().rows() == 24);
  CHECK(ch.isometry().cols() == 6);
  CHECK((ch.isometry().adjoint() * ch.isometry() - Mat::Identity(6, 6)).norm() < 1e-10);
  CHECK(ch.t_effective() == doctest::Approx(0.25));
  CHECK(random_channel(3, 8, 0.25, 7).isometry() == ch.isometry());
  CHECK(random_channel(3, 8, 0.25, 8).isometry() != ch.isometry());

  const auto odd = random_channel(3, 7, 0.3, 1);
  CHECK(odd.d() == 6);
  CHECK(odd.t_effective() == doctest::Approx(6.0 / 21.0));

  CHECK_THROWS_AS(random_channel(2, 2, 0.1, 1), DomainError);
  CHECK_THROWS_AS(channel_from_isometry(2, 2, Mat::Ones(4, 2)), DomainError);
}

TEST_CASE("states and entropies") {
  CHECK(entropy(std::vector<double>{0.25, 0.25, 0.25, 0.25}) == doctest::Approx(std::log(4.0)));
  CHECK(entropy(std::vector<double>{0.25, 0.25, 0.25, 0.25}, 2.0) == doctest::Approx(std::log(4.0)));
  CHECK(entropy(std::vector<double>{0.25, 0.25, 0.25, 0.25}, 0.5) == doctest::Approx(std::log(4.0)));
  CHECK(entropy(std::vector<double>{1.0, 0.0, 0.0}) == 0.0);
  CHECK(entropy(std::vector<double>{0.5, 0.5}, 2.0) == doctest::Approx(std::log(2.0)));
  CHECK(entropy(std::vector<double>{0.7, 0.3}) ==
        doctest::Approx(-0.7 * std::log(0.7) - 0.3 * std::log(0.3)));
  CHECK(binary_entropy(0.3) == doctest::Approx(-0.7 * std::log(0.7) - 0.3 * std::log(0.3)));
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK_THROWS_AS(entropy(std::vector<double>{0.5, 0.5}, 0.0), DomainError);

  CHECK(entropy(QuantumState::maximally_mixed(5)) == doctest::Approx(std::log(5.0)));
  Eigen::VectorXcd psi(2);
  psi << 3.0, std::complex<double>(0.0, 4.0);
  const auto pure = QuantumState::pure(psi);
  CHECK(std::abs(entropy(pure)) < 1e-12);
  CHECK(pure.spectrum()[0] == doctest::Approx(1.0));

  Mat bad = Mat::Identity(2, 2);
  CHECK_THROWS_AS(QuantumState{bad}, DomainError);
  bad(0, 0) = 1.5;
  bad(1, 1) = -0.5;
  CHECK_THROWS_AS(QuantumState{bad}, DomainError);
}

TEST_CASE("apply_channel matches an explicit partial trace") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto ch = random_channel(3, 4, 0.5, seed);
    const auto x = random_mixed(ch.d(), seed + 100);
    const Mat& v = ch.isometry();
    const Mat full = v * x.matrix() * v.adjoint();
    CHECK((apply_channel(ch, x).matrix() - trace_out_second(full, 3, 4)).norm() < 1e-12);
    CHECK((apply_complementary_channel(ch, x).matrix() - trace_out_first(full, 3, 4)).norm() < 1e-12);
    const Mat vc = v.conjugate();
    const Mat fullc = vc * x.matrix() * vc.adjoint();
    CHECK((apply_conjugate_channel(ch, x).matrix() - trace_out_second(fullc, 3, 4)).norm() < 1e-12);

    const auto psi = random_pure_vector(ch.d(), seed, 3);
    CHECK((output_of_pure(ch, psi) -
           apply_channel(ch, QuantumState::pure(psi)).matrix()).norm() < 1e-12);
  }
}

TEST_CASE("channel outputs are states") {
  const auto ch = random_channel(4, 5, 0.4, 11);
  for (int i = 0; i < 20; ++i) {
    const auto y = apply_channel(ch, QuantumState::pure(random_pure_vector(ch.d(), 11, i)));
    CHECK(std::abs(y.matrix().trace() - 1.0) < 1e-10);
    for (double e : y.spectrum()) CHECK(e >= -1e-10);
  }
  const auto scalar = random_channel(1, 6, 1.0, 2);
  const auto y = apply_channel(scalar, QuantumState::maximally_mixed(scalar.d()));
  CHECK(y.dim() == 1);
  CHECK(std::abs(y.matrix()(0, 0) - 1.0) < 1e-12);

  const auto unit = random_channel(3, 4, 1.0, 5);
  const auto mixed = apply_channel(unit, QuantumState::maximally_mixed(12));
  CHECK((mixed.matrix() - Mat::Identity(3, 3) / 3.0).norm() < 1e-10);

  CHECK_THROWS_AS(apply_channel(ch, QuantumState::maximally_mixed(3)), DomainError);
}

TEST_CASE("conjugate channel") {
  // Real isometry: conj Phi = Phi.
  Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(Eigen::MatrixXd::Random(6, 3))
                          .householderQ() * Eigen::MatrixXd::Identity(6, 3);
  const auto real = channel_from_isometry(2, 3, q.cast<std::complex<double>>());
  const auto x = random_mixed(3, 4);
  CHECK((apply_channel(real, x).matrix() - apply_conjugate_channel(real, x).matrix()).norm() <
        1e-12);

  // conj Phi(conj X) = conj(Phi(X)), so the spectra agree.
  const auto ch = random_channel(3, 5, 0.4, 9);
  for (int i = 0; i < 10; ++i) {
    const auto psi = random_pure_vector(ch.d(), 9, i);
    const auto a = apply_channel(ch, QuantumState::pure(psi)).spectrum();
    const auto b = apply_conjugate_channel(ch, QuantumState::pure(psi.conjugate().eval())).spectrum();
    for (std::size_t j = 0; j < a.size(); ++j) CHECK(std::abs(a[j] - b[j]) < 1e-12);
  }
}

TEST_CASE("complementary outputs share nonzero spectra") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto ch = random_channel(3, 5, 0.5, seed);
    const auto x = QuantumState::pure(random_pure_vector(ch.d(), seed, 0));
    const auto a = nonzero_sorted(apply_channel(ch, x).spectrum());
    const auto b = nonzero_sorted(apply_complementary_channel(ch, x).spectrum());
    REQUIRE(a.size() == b.size());
    for (std::size_t j = 0; j < a.size(); ++j) CHECK(std::abs(a[j] - b[j]) < 1e-9);
  }
}

TEST_CASE("bell output") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto ch = random_channel(3, 8, 0.25, seed);
    const auto b = bell_output(ch);
    CHECK(b.dim() == 9);
    CHECK(std::abs(b.matrix().trace() - 1.0) < 1e-10);
    CHECK(b.spectrum()[0] >= ch.t_effective() - 1e-10);
    CHECK(entropy(b) <= product_bound(3, ch.t_effective()) + 1e-9);
  }
  const auto small = random_channel(2, 6, 0.5, 3);
  CHECK(entropy(bell_output(small)) <= 2.0 * std::log(2.0) + 1e-9);

  // Reference: (V ⊗ conj V)|Omega>, reshuffled to (k k) x (n n), traced over n n.
  const auto ch = random_channel(2, 3, 0.5, 4);
  const int k = 2, n = 3, d = ch.d();
  Eigen::VectorXcd omega = Eigen::VectorXcd::Zero(d * d);
  for (int i = 0; i < d; ++i) omega(i * d + i) = 1.0 / std::sqrt(static_cast<double>(d));
  Mat vv(k * n * k * n, d * d);
  const Mat& v = ch.isometry();
  const Mat vc = v.conjugate();
  for (int r1 = 0; r1 < k * n; ++r1)
    for (int r2 = 0; r2 < k * n; ++r2)
      for (int c1 = 0; c1 < d; ++c1)
        for (int c2 = 0; c2 < d; ++c2) vv(r1 * k * n + r2, c1 * d + c2) = v(r1, c1) * vc(r2, c2);
  const Eigen::VectorXcd big = vv * omega;
  Mat ref = Mat::Zero(k * k, k * k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      for (int i2 = 0; i2 < k; ++i2)
        for (int j2 = 0; j2 < k; ++j2)
          for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
              const auto row = (i * n + a) * k * n + (j * n + b);
              const auto col = (i2 * n + a) * k * n + (j2 * n + b);
              ref(i * k + j, i2 * k + j2) += big(row) * std::conj(big(col));
            }
  CHECK((bell_output(ch).matrix() - ref).norm() < 1e-12);

  const auto scalar = random_channel(1, 4, 1.0, 1);
  CHECK(bell_output(scalar).matrix()(0, 0).real() == doctest::Approx(1.0));
}

TEST_CASE("output spectra lie in K_{k,t}") {
  const auto ch = random_channel(2, 300, 0.5, 21);
  const auto spectra = sample_output_spectra(ch, 200, 21);
  REQUIRE(spectra.size() == 200);
  const double t = ch.t_effective();
  const auto sb = simplex_bounds(2, t);
  const auto probes = default_probes(2, 21);
  for (const auto& s : spectra) {
    double sum = 0.0;
    for (double v : s) {
      CHECK(v >= sb.l - 0.05);
      CHECK(v <= sb.u + 0.05);
      sum += v;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::is_sorted(s.rbegin(), s.rend()));
    CHECK(kkt_membership(s, t, probes, 0.05).member);
  }
  CHECK(sample_output_spectra(ch, 5, 21) ==
        std::vector<std::vector<double>>(spectra.begin(), spectra.begin() + 5));
}

TEST_CASE("concentration statistic") {
  const auto ch = random_channel(4, 50, 0.1, 5);
  const auto st = concentration_stat(ch, 500, 5);
  const double t = ch.t_effective();
  CHECK(st.bound == doctest::Approx(t * (1.0 + 2.0 * std::sqrt((1.0 - t) / (t * 4.0)))));
  CHECK(st.regime_ok);
  CHECK(st.max_l2 <= std::sqrt(1.0 - 0.25) + 1e-12);
  CHECK(st.max_l2 > 0.0);

  // Same statistic recomputed from the sampled inputs.
  double ref = 0.0;
  for (int i = 0; i < 500; ++i)
    ref = std::max(ref, l2_to_mixed(output_of_pure(ch, random_pure_vector(ch.d(), 5, i))));
  CHECK(st.max_l2 == doctest::Approx(ref).epsilon(1e-12));

  const auto scalar = random_channel(1, 5, 1.0, 1);
  CHECK(concentration_stat(scalar, 10, 1).max_l2 == doctest::Approx(0.0));
  CHECK(!concentration_stat(random_channel(2, 4, 0.75, 1), 10, 1).regime_ok);
}

TEST_CASE("hmin search") {
  CHECK(hmin_estimate(random_channel(1, 4, 1.0, 1), 2, 1) == doctest::Approx(0.0).scale(1.0));

  const auto u = random_channel(2, 2, 1.0, 3);
  double prev = INFINITY;
  for (int r : {1, 2, 4, 8}) {
    const double h = hmin_estimate(u, r, 3);
    CHECK(h >= -1e-12);
    CHECK(h <= std::log(2.0) + 1e-12);
    CHECK(h <= prev + 1e-15);
    prev = h;
  }

  // H^min(Phi) = H^min(conj Phi), realized through conjugated inputs.
  const auto ch = random_channel(3, 4, 0.5, 8);
  const auto a = hmin_search(ch, 4, 8, false);
  const auto b = hmin_search(ch, 4, 8, true);
  CHECK(a.entropy == doctest::Approx(b.entropy).epsilon(1e-9));
  const auto via_conj = apply_conjugate_channel(ch, QuantumState::pure(a.best_input.conjugate().eval()));
  CHECK(entropy(via_conj) == doctest::Approx(a.entropy).epsilon(1e-9));

  // The search improves on random inputs.
  double sampled_min = INFINITY;
  for (const auto& s : sample_output_spectra(ch, 50, 99)) sampled_min = std::min(sampled_min, entropy(s));
  CHECK(a.entropy <= sampled_min + 1e-12);
}

TEST_CASE("hmin is consistent with the Hastings gap") {
  const auto ch = random_channel(2, 300, 0.5, 13);
  const auto est = hmin_search(ch, 3, 13);
  const QuantumState best = apply_channel(ch, QuantumState::pure(est.best_input));
  const auto gap = hastings_gap(best);
  CHECK(gap.lhs <= gap.rhs + 1e-12);
  const double l2 = l2_to_mixed(best.matrix());
  CHECK(est.entropy >= std::log(2.0) - 2.0 * l2 * l2 - 1e-12);
  // d = (k-1)(n-1) + 1 here, so the range of V meets the product vectors and
  // the minimum output entropy is 0.
  CHECK(est.entropy < 1e-2);
  // Random inputs stay far from that minimum.
  const auto st = concentration_stat(ch, 500, 13);
  CHECK(st.max_l2 < 0.5);
}
