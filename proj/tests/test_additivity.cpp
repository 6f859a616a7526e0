#include <cmath>
#include <random>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "doctest.h"
#include "freecontract/additivity.hpp"
#include "freecontract/error.hpp"
#include "freecontract/qchannel.hpp"
#include "freecontract/random.hpp"

using namespace fc;

namespace {

using big = boost::multiprecision::cpp_bin_float_50;

big phi_big(const big& a, const big& b) {
  return a + b - 2 * a * b + 2 * sqrt(a * b * (1 - a) * (1 - b));
}

// g(k, r) evaluated straight from the definition at 50 digits.
big g_big(int k, const big& r) {
  const big kk = k;
  const big t = pow(kk, -r);
  const big l = 1 - phi_big((kk - 1) / kk, t);
  const big u = phi_big(1 / kk, t);
  const big rad = 1 + 2 * sqrt((1 - t) / (t * kk));
  const big f = log(kk) - (kk / 2 + (u - 1 / kk) / (6 * l * l)) * t * t * rad * rad;
  const big h = -t * log(t) - (1 - t) * log(1 - t);
  return 2 * (1 - t) * log(kk) + h - 2 * f;
}

}  // namespace

TEST_CASE("phi_overlap examples") {
  CHECK(phi_overlap(0.5, 0.5) == doctest::Approx(1.0).epsilon(1e-15));
  for (double a : {0.0, 0.1, 0.37, 0.9, 1.0}) {
    CHECK(phi_overlap(a, 0.0) == doctest::Approx(a).epsilon(1e-15));
    CHECK(phi_overlap(a, 1.0) == doctest::Approx(1.0 - a).epsilon(1e-15));
  }
  CHECK(phi_overlap(0.3, 0.7) == doctest::Approx(phi_overlap(0.7, 0.3)));
  CHECK_THROWS_AS(phi_overlap(-0.1, 0.5), DomainError);
  CHECK_THROWS_AS(phi_overlap(0.5, 1.1), DomainError);
  CHECK_THROWS_AS(phi_overlap(std::nan(""), 0.5), DomainError);
}

TEST_CASE("phi_overlap stays in [0,1]") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const double v = phi_overlap(U(gen), U(gen));
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("simplex_bounds examples and ordering") {
  const auto b = simplex_bounds(2, 0.5);
  CHECK(b.l == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(b.u == doctest::Approx(1.0).epsilon(1e-12));

  for (int k : {2, 3, 10, 100, 31114}) {
    for (double t : {1e-6, 1e-3, 0.01, 0.2, 0.5, 0.9, 1.0}) {
      const auto s = simplex_bounds(k, t);
      CHECK(s.l >= 0.0);
      CHECK(s.l <= 1.0 / k + 1e-15);
      CHECK(s.u >= 1.0 / k - 1e-15);
      CHECK(s.u <= 1.0);
    }
  }
  // Saturated edges.
  const auto one = simplex_bounds(7, 1.0);
  CHECK(one.u == 1.0);
  CHECK(one.l == 0.0);
  CHECK(simplex_bounds(7, 1.0 / 7).l == 0.0);
  CHECK(simplex_bounds(7, 0.1).l > 0.0);
  CHECK(simplex_bounds(7, 0.5).u < 1.0);

  const int k = 31114;
  const double t = std::pow(static_cast<double>(k), -1.387);
  const auto s = simplex_bounds(k, t);
  const big tb = pow(big(k), big(-1.387));
  CHECK(s.l == doctest::Approx(static_cast<double>(1 - phi_big(big(k - 1) / k, tb))).epsilon(1e-12));
  CHECK(s.u == doctest::Approx(static_cast<double>(phi_big(big(1) / k, tb))).epsilon(1e-12));
  CHECK_THROWS_AS(simplex_bounds(1, 0.5), DomainError);
  CHECK_THROWS_AS(simplex_bounds(3, 0.0), DomainError);
}

TEST_CASE("taylor_lower_f") {
  CHECK_THROWS_AS(taylor_lower_f(2, 0.5), DomainError);
  CHECK_THROWS_AS(taylor_lower_f(50, 1.0 / 50), DomainError);
  // t = 1/k sits exactly on l = 0.
  CHECK_THROWS_AS(taylor_lower_f(100, 0.01), DomainError);
  for (double t : {0.005, 1e-3, 1e-4}) {
    const double f = taylor_lower_f(100, t);
    CHECK(std::isfinite(f));
    CHECK(f < std::log(100.0));
  }

  std::mt19937_64 gen(5);
  std::uniform_int_distribution<int> K(10, 100000);
  std::uniform_real_distribution<double> R(1.05, 1.99);
  for (int i = 0; i < 200; ++i) {
    const int k = K(gen);
    const double r = R(gen);
    const double t = std::pow(static_cast<double>(k), -r);
    const big tb = t;
    const big kk = k;
    const big l = 1 - phi_big((kk - 1) / kk, tb);
    const big u = phi_big(1 / kk, tb);
    const big rad = 1 + 2 * sqrt((1 - tb) / (tb * kk));
    const big ref = log(kk) - (kk / 2 + (u - 1 / kk) / (6 * l * l)) * tb * tb * rad * rad;
    CHECK(taylor_lower_f(k, t) == doctest::Approx(static_cast<double>(ref)).epsilon(1e-13));
  }
}

TEST_CASE("product_bound") {
  CHECK(product_bound(2, 0.5) == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-15));
  CHECK(product_bound(10, 1.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(product_bound(4, 1.0 / 16) > 0.0);
  CHECK_THROWS_AS(product_bound(4, 1.0 / 17), DomainError);
  CHECK_THROWS_AS(product_bound(4, 0.0), DomainError);
}

TEST_CASE("gap_g headline point") {
  const auto rep = gap_g(31114, 1.387);
  // 50-digit reference, computed independently below and frozen offline.
  const double frozen = -6.7155585050e-12;
  const double ref = static_cast<double>(g_big(31114, big(1.387)));
  CHECK(ref == doctest::Approx(frozen).epsilon(1e-9));
  CHECK(std::fabs(rep.g - ref) < 2e-15);
  CHECK(std::fabs(rep.g - (-6.71108e-12)) <= 1e-12);
  CHECK(rep.violated);
  CHECK(rep.k == 31114);
  CHECK(rep.t == doctest::Approx(std::pow(31114.0, -1.387)).epsilon(1e-14));
  CHECK(rep.product_bound - 2.0 * rep.single_lower == doctest::Approx(rep.g).epsilon(1e-3));
}

TEST_CASE("gap_g elsewhere") {
  CHECK(gap_g(100, 1.387).g == doctest::Approx(0.03284).epsilon(1e-3));
  CHECK_FALSE(gap_g(100, 1.387).violated);
  CHECK(gap_g(1000, 1.387).g == doctest::Approx(3.668e-4).epsilon(1e-3));
  CHECK(gap_g(100, 1.5).g == doctest::Approx(9.96e-3).epsilon(2e-3));
  CHECK_THROWS_AS(gap_g(31114, 1.0), DomainError);
  CHECK_THROWS_AS(gap_g(100, 1.0), DomainError);
  CHECK(gap_g(10000, 1.001).g > 0.0);
  CHECK_THROWS_AS(gap_g(31114, 2.0), DomainError);
  CHECK_THROWS_AS(gap_g(1, 1.5), DomainError);

  std::mt19937_64 gen(9);
  std::uniform_int_distribution<int> K(10, 200000);
  std::uniform_real_distribution<double> R(1.05, 1.95);
  for (int i = 0; i < 200; ++i) {
    const int k = K(gen);
    const double r = R(gen);
    const double ref = static_cast<double>(g_big(k, big(r)));
    CHECK(std::fabs(gap_g(k, r).g - ref) <= 1e-14 + 1e-12 * std::fabs(ref));
  }
}

TEST_CASE("k = 31113 does not violate on the 0.001 grid") {
  for (double r : r_grid(1.001, 2.0, 0.001)) {
    CHECK(gap_g(31113, r).g > 0.0);
  }
}

TEST_CASE("gap_g continuity in r") {
  // f has a pole at r = 1 (l = 0), so stay a little away from it.
  std::mt19937_64 gen(21);
  std::uniform_int_distribution<int> K(100, 100000);
  std::uniform_real_distribution<double> R(1.05, 1.98);
  for (int i = 0; i < 300; ++i) {
    const int k = K(gen);
    const double r = R(gen);
    CHECK(std::fabs(gap_g(k, r).g - gap_g(k, r + 1e-6).g) <= 1e-4);
  }
}

TEST_CASE("single zero crossing in k at r = 1.387") {
  const auto ks = log_spaced_k(1e4, 1e5, 400);
  int changes = 0;
  bool prev = gap_g(ks.front(), 1.387).violated;
  CHECK_FALSE(prev);
  for (int k : ks) {
    const bool v = gap_g(k, 1.387).violated;
    if (v != prev) ++changes;
    prev = v;
  }
  CHECK(changes == 1);
  CHECK(prev);

  int lo = 10000, hi = 100000;
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    (gap_g(mid, 1.387).violated ? hi : lo) = mid;
  }
  CHECK(hi == 31114);
}

TEST_CASE("grids") {
  const auto ks = log_spaced_k(1e4, 1e5, 200);
  CHECK(ks.front() == 10000);
  CHECK(ks.back() == 100000);
  for (std::size_t i = 1; i < ks.size(); ++i) CHECK(ks[i] > ks[i - 1]);
  CHECK(log_spaced_k(10, 10, 5) == std::vector<int>{10});

  const auto rs = r_grid(1.0, 2.0, 0.001);
  CHECK(rs.size() == 1000);
  CHECK(rs.front() == 1.0);
  CHECK(rs[387] == doctest::Approx(1.387).epsilon(1e-15));
  CHECK(rs.back() < 2.0);
  CHECK_THROWS_AS(r_grid(0.5, 2.0, 0.1), DomainError);
  CHECK_THROWS_AS(log_spaced_k(1.0, 10.0, 3), DomainError);
}

TEST_CASE("scan_violation reproduces the minimal dimension") {
  const auto ks = log_spaced_k(1e4, 1e5, 200);
  const auto rs = r_grid(1.0, 2.0, 0.001);
  const auto s = scan_violation(ks, rs);
  CHECK(s.cells.size() == ks.size() * rs.size());
  REQUIRE(s.min_violating_k.has_value());
  // Grid resolution: neighbouring log-spaced points differ by about 1.2%.
  CHECK(*s.min_violating_k >= 31114);
  CHECK(*s.min_violating_k <= 31114 * 1.013);
  CHECK(s.argmin_r == doctest::Approx(1.387).epsilon(0.01));
  CHECK(s.g_at_min < 0.0);
  REQUIRE(s.refined_min_k.has_value());
  CHECK(*s.refined_min_k == 31114);
  CHECK(s.refined_r == doctest::Approx(1.387).epsilon(1e-12));
  CHECK(s.refined_g == doctest::Approx(-6.7155585050e-12).epsilon(1e-3));

  // r = 1 is undefined and recorded as such.
  CHECK_FALSE(s.cells.front().g.has_value());
  CHECK(s.cells[1].g.has_value());
  // k-major ordering.
  CHECK(s.cells[rs.size()].k == ks[1]);
}

TEST_CASE("scan_violation small k and single point") {
  const auto none = scan_violation(log_spaced_k(2, 1000, 60), r_grid(1.0, 2.0, 0.01));
  CHECK_FALSE(none.min_violating_k.has_value());
  CHECK_FALSE(none.refined_min_k.has_value());

  const auto one = scan_violation({31114}, {1.387});
  REQUIRE(one.cells.size() == 1);
  CHECK(one.cells[0].g.value() == doctest::Approx(gap_g(31114, 1.387).g));
  REQUIRE(one.min_violating_k.has_value());
  CHECK(*one.min_violating_k == 31114);
  CHECK(*one.refined_min_k == 31114);
  CHECK(one.g_at_min == one.cells[0].g.value());

  const auto clean = scan_violation({100}, {1.387});
  CHECK(clean.cells.size() == 1);
  CHECK_FALSE(clean.min_violating_k.has_value());
}

TEST_CASE("hastings_gap") {
  for (int k : {2, 3, 8}) {
    const auto g = hastings_gap(QuantumState::maximally_mixed(k));
    CHECK(std::fabs(g.lhs) < 1e-14);
    CHECK(std::fabs(g.rhs) < 1e-14);
  }
  const auto pure = hastings_gap(QuantumState::pure(random_pure_vector(4, 3, 0)));
  CHECK(pure.lhs == doctest::Approx(std::log(4.0)).epsilon(1e-12));
  CHECK(pure.rhs == doctest::Approx(3.0).epsilon(1e-12));

  std::mt19937_64 gen(17);
  std::uniform_int_distribution<int> K(2, 8);
  std::normal_distribution<double> N;
  int worst_violation = 0;
  for (int i = 0; i < 1000; ++i) {
    const int k = K(gen);
    const int rank = 1 + static_cast<int>(gen() % k);
    Eigen::MatrixXcd g(k, rank);
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < rank; ++b) g(a, b) = {N(gen), N(gen)};
    Eigen::MatrixXcd rho = g * g.adjoint();
    rho /= rho.trace().real();
    const auto h = hastings_gap(QuantumState(rho));
    if (!(h.lhs <= h.rhs + 1e-12)) ++worst_violation;
  }
  CHECK(worst_violation == 0);
}

TEST_CASE("product_bound dominates the Bell output entropy") {
  for (int k : {2, 3, 4}) {
    for (double t : {0.25, 0.5}) {
      const auto ch = random_channel(k, 20, t, 100 + k);
      const double te = ch.t_effective();
      if (te < 1.0 / (k * k)) continue;
      CHECK(entropy(bell_output(ch)) <= product_bound(k, te) + 1e-9);
    }
  }
}
