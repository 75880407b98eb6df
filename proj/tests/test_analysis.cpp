#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "rismp/analysis.hpp"
#include "rismp/architectures.hpp"
#include "rismp/channel.hpp"

using namespace rismp;

namespace {

constexpr Complex kJ{0.0, 1.0};

SISOInstance random_instance(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  SISOInstance inst;
  inst.h_ri.resize(n);
  inst.h_it.resize(n);
  for (int i = 0; i < n; ++i) {
    inst.h_ri(i) = Complex(gauss(rng), gauss(rng));
    inst.h_it(i) = Complex(gauss(rng), gauss(rng));
  }
  return inst;
}

double grid_search(const SISOInstance& inst, int points) {
  const int n = int(inst.h_it.size());
  VectorXd theta = VectorXd::Zero(n);
  std::vector<int> idx(n, 0);
  double best = 0.0;
  const double step = 2.0 * M_PI / points;
  while (true) {
    for (int i = 0; i < n; ++i) {
      theta(i) = idx[i] * step;
    }
    const Complex h = siso_exact(inst, theta);
    best = std::max(best, inst.p_t * std::norm(h));
    int i = 0;
    for (; i < n; ++i) {
      if (++idx[i] < points) break;
      idx[i] = 0;
    }
    if (i == n) break;
  }
  return best;
}

}  // namespace

TEST_CASE("siso_exact trivial values") {
  SISOInstance inst = random_instance(4, 1);
  CHECK(std::abs(siso_exact(inst, VectorXd::Zero(4))) < 1e-14);

  SISOInstance one = random_instance(1, 2);
  VectorXd pi_vec(1);
  pi_vec << M_PI;
  const Complex h1 = one.h_ri(0) * one.h_it(0);
  CHECK(std::abs(siso_exact(one, pi_vec) + 2.0 * h1) < 1e-13);
}

TEST_CASE("siso_exact matches the matched S-kind channel") {
  const int n = 5;
  SISOInstance inst = random_instance(n, 3);
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> phase(0.3, 6.0);
  VectorXd theta(n);
  for (int i = 0; i < n; ++i) {
    theta(i) = phase(rng);
  }

  MatrixXcd theta_mat = MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    theta_mat(i, i) = std::exp(kJ * theta(i));
  }
  MatchedBlocks blocks{
      NetworkKind::S,
      MatrixXcd::Constant(1, 1, -(inst.h_ri * inst.h_it).value()),
      inst.h_ri, inst.h_it};
  const RisTermination ris = impedance_from_theta(theta_mat, 50.0);
  const ChannelMatrix ch = matched_channel(blocks, ris, 50.0);
  CHECK(std::abs(ch.h(0, 0) - siso_exact(inst, theta)) < 1e-10);
}

TEST_CASE("exact-minus-approx offset is theta independent") {
  SISOInstance inst = random_instance(6, 4);
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
  const Complex offset = -(inst.h_ri * inst.h_it).value();
  for (int trial = 0; trial < 10; ++trial) {
    VectorXd theta(6);
    for (int i = 0; i < 6; ++i) {
      theta(i) = phase(rng);
    }
    const Complex diff = siso_exact(inst, theta) - siso_approx(inst, theta);
    CHECK(std::abs(diff - offset) < 1e-13);
    CHECK(std::abs(siso_approx(inst, theta)) <=
          inst.h_ri.transpose().cwiseProduct(inst.h_it).cwiseAbs().sum() +
              1e-12);
  }
}

TEST_CASE("max_power_exact against grid search") {
  for (int n = 1; n <= 3; ++n) {
    const int points = n == 1 ? 100000 : (n == 2 ? 700 : 200);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const SISOInstance inst = random_instance(n, 10 * n + seed);
      const PowerResult exact = max_power_exact(inst);
      const double grid = grid_search(inst, points);
      CHECK(grid <= exact.power * (1.0 + 1e-9));
      CHECK(exact.power - grid < 0.01 * exact.power);
    }
  }
}

TEST_CASE("realizability of the returned phases") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const SISOInstance inst = random_instance(5, seed);
    const PowerResult exact = max_power_exact(inst);
    const double achieved =
        inst.p_t * std::norm(siso_exact(inst, exact.theta));
    CHECK(std::abs(achieved - exact.power) < 1e-10 * exact.power);

    const PowerResult approx = max_power_approx(inst);
    const double achieved_a =
        inst.p_t * std::norm(siso_approx(inst, approx.theta));
    CHECK(std::abs(achieved_a - approx.power) < 1e-10 * approx.power);
    CHECK(approx.power <= exact.power + 1e-12);
  }
}

TEST_CASE("orthogonal instance drops the structural term") {
  SISOInstance inst;
  inst.h_ri.resize(2);
  inst.h_it.resize(2);
  inst.h_ri << 1.0, 1.0;
  inst.h_it << 1.0, -1.0;
  CHECK(std::abs((inst.h_ri * inst.h_it).value()) < 1e-15);
  CHECK(max_power_exact(inst).power == doctest::Approx(4.0));
  CHECK(max_power_approx(inst).power == doctest::Approx(4.0));
}

TEST_CASE("LoS closed forms") {
  CHECK(los_expected_power(100) == doctest::Approx(11872.4539).epsilon(1e-6));
  CHECK(los_expected_power(1) == doctest::Approx(2.0 + std::sqrt(M_PI)));
  CHECK(los_delta(100) == doctest::Approx(0.157715).epsilon(1e-4));
  CHECK(los_delta(100000000) < 2e-3);

  double prev = 1.0;
  for (int n : {2, 4, 16, 64, 256, 1024}) {
    CHECK(los_delta(n) < prev);
    prev = los_delta(n);
  }

  for (int n : {1, 8, 100}) {
    const double e = los_expected_power(n);
    CHECK(los_delta(n) ==
          doctest::Approx((e - double(n) * n) / e).epsilon(1e-12));
  }
}

TEST_CASE("monte carlo determinism and LoS identities") {
  const MonteCarloPowers a =
      monte_carlo_powers(16, 1, 7, FadingModel::los_random_phase);
  const MonteCarloPowers b =
      monte_carlo_powers(16, 1, 7, FadingModel::los_random_phase);
  CHECK(a.mean_exact == b.mean_exact);
  CHECK(a.mean_approx == b.mean_approx);

  const MonteCarloPowers mc =
      monte_carlo_powers(32, 200, 11, FadingModel::los_random_phase);
  CHECK(mc.mean_approx == doctest::Approx(32.0 * 32.0).epsilon(1e-9));
}

TEST_CASE("monte carlo matches the CLT closed forms") {
  const int n = 64;
  const MonteCarloPowers mc =
      monte_carlo_powers(n, 10000, 5, FadingModel::los_random_phase);
  CHECK(std::abs(mc.mean_exact - los_expected_power(n)) <
        3.0 * mc.stderr_exact + 0.05 * n);
  CHECK(std::abs(mc.empirical_delta() - los_delta(n)) < 0.01);
}
