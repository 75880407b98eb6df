#include "rismp/analysis.hpp"

#include <cmath>
#include <random>

namespace rismp {

namespace {

constexpr Complex kJ{0.0, 1.0};

VectorXcd path_products(const SISOInstance& inst) {
  return inst.h_ri.transpose().cwiseProduct(inst.h_it);
}

std::mt19937_64 trial_stream(std::uint64_t seed, std::uint64_t trial) {
  std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32),
                    std::uint32_t(trial), std::uint32_t(trial >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

void SISOInstance::check() const {
  if (h_ri.size() != h_it.size()) {
    throw ConfigError("SISOInstance: h_RI and h_IT lengths differ");
  }
  if (p_t <= 0.0) {
    throw ConfigError("SISOInstance: transmit power must be positive");
  }
}

Complex siso_exact(const SISOInstance& inst, const VectorXd& theta) {
  return siso_approx(inst, theta) - (inst.h_ri * inst.h_it).value();
}

Complex siso_approx(const SISOInstance& inst, const VectorXd& theta) {
  inst.check();
  Complex h = 0.0;
  for (int n = 0; n < inst.h_it.size(); ++n) {
    h += inst.h_ri(n) * std::exp(kJ * theta(n)) * inst.h_it(n);
  }
  return h;
}

PowerResult max_power_exact(const SISOInstance& inst) {
  inst.check();
  const Complex s = (inst.h_ri * inst.h_it).value();
  const VectorXcd a = path_products(inst);

  PowerResult out;
  const double amplitude = std::abs(s) + a.cwiseAbs().sum();
  out.power = inst.p_t * amplitude * amplitude;
  // Co-phase every RIS path with the structural term -s.
  const double target = std::arg(-s);
  out.theta.resize(a.size());
  for (int n = 0; n < a.size(); ++n) {
    out.theta(n) = target - std::arg(a(n));
  }
  return out;
}

PowerResult max_power_approx(const SISOInstance& inst) {
  inst.check();
  const VectorXcd a = path_products(inst);

  PowerResult out;
  const double amplitude = a.cwiseAbs().sum();
  out.power = inst.p_t * amplitude * amplitude;
  out.theta.resize(a.size());
  for (int n = 0; n < a.size(); ++n) {
    out.theta(n) = -std::arg(a(n));
  }
  return out;
}

double los_expected_power(int n_i) {
  const double n = n_i;
  return n * n + std::sqrt(M_PI * n) * n + n;
}

double los_delta(int n_i) {
  const double n = n_i;
  const double root = std::sqrt(M_PI * n);
  return (root + 1.0) / (n + root + 1.0);
}

MonteCarloPowers monte_carlo_powers(int n_i, int trials,
                                    std::uint64_t seed, FadingModel model) {
  if (n_i < 1 || trials < 1) {
    throw ConfigError("monte_carlo_powers: n_i and trials must be >= 1");
  }
  double sum_e = 0.0, sum_e2 = 0.0, sum_a = 0.0, sum_a2 = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng = trial_stream(seed, std::uint64_t(t));
    SISOInstance inst;
    inst.h_ri.resize(n_i);
    inst.h_it.resize(n_i);
    if (model == FadingModel::los_random_phase) {
      std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
      for (int n = 0; n < n_i; ++n) {
        inst.h_ri(n) = std::exp(kJ * phase(rng));
        inst.h_it(n) = std::exp(kJ * phase(rng));
      }
    } else {
      std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
      for (int n = 0; n < n_i; ++n) {
        inst.h_ri(n) = Complex(gauss(rng), gauss(rng));
        inst.h_it(n) = Complex(gauss(rng), gauss(rng));
      }
    }
    const double pe = max_power_exact(inst).power;
    const double pa = max_power_approx(inst).power;
    sum_e += pe;
    sum_e2 += pe * pe;
    sum_a += pa;
    sum_a2 += pa * pa;
  }

  MonteCarloPowers out;
  out.trials = trials;
  out.mean_exact = sum_e / trials;
  out.mean_approx = sum_a / trials;
  auto stderr_of = [&](double sum, double sum2) {
    if (trials < 2) return 0.0;
    const double mean = sum / trials;
    const double var =
        std::max(0.0, (sum2 - trials * mean * mean) / (trials - 1));
    return std::sqrt(var / trials);
  };
  out.stderr_exact = stderr_of(sum_e, sum_e2);
  out.stderr_approx = stderr_of(sum_a, sum_a2);
  return out;
}

}  // namespace rismp
