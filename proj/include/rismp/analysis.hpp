#ifndef RISMP_ANALYSIS_HPP
#define RISMP_ANALYSIS_HPP

#include <cstdint>

#include "rismp/types.hpp"

namespace rismp {

/// SISO link through an N_I-element RIS with matched single-antenna
/// terminals: row vector h_RI (RIS to receiver), column vector h_IT
/// (transmitter to RIS).
struct SISOInstance {
  RowVectorXcd h_ri;
  VectorXcd h_it;
  double p_t = 1.0;

  void check() const;
};

/// Exact matched model including structural scattering:
/// h = -h_RI h_IT + h_RI diag(e^{j theta}) h_IT.
Complex siso_exact(const SISOInstance& inst, const VectorXd& theta);

/// Widely used approximation h' = h_RI diag(e^{j theta}) h_IT.
Complex siso_approx(const SISOInstance& inst, const VectorXd& theta);

struct PowerResult {
  double power;    // W
  VectorXd theta;  // realizing phase vector
};

/// Maximum received power of the exact model,
/// P_R = P_T (|h_RI h_IT| + sum_n |[h_RI]_n [h_IT]_n|)^2,
/// with a co-phasing theta* that attains it.
PowerResult max_power_exact(const SISOInstance& inst);

/// Maximum of the approximate model, P_R' = P_T (sum_n |...|)^2.
PowerResult max_power_approx(const SISOInstance& inst);

/// Closed-form expected maximum power over LoS random-phase channels,
/// E[P_R] = N_I^2 + sqrt(pi N_I) N_I + N_I (CLT approximation).
double los_expected_power(int n_i);

/// Relative exact-vs-approximate gap,
/// delta = (sqrt(pi N_I) + 1) / (N_I + sqrt(pi N_I) + 1).
double los_delta(int n_i);

enum class FadingModel { los_random_phase, rayleigh };

struct MonteCarloPowers {
  double mean_exact = 0.0;
  double mean_approx = 0.0;
  double stderr_exact = 0.0;
  double stderr_approx = 0.0;
  int trials = 0;

  double empirical_delta() const {
    return (mean_exact - mean_approx) / mean_exact;
  }
};

/// Per-trial optimal powers averaged over random channels. Deterministic
/// given the seed; each trial draws from its own (seed, trial) substream.
MonteCarloPowers monte_carlo_powers(int n_i, int trials,
                                    std::uint64_t seed, FadingModel model);

}  // namespace rismp

#endif  // RISMP_ANALYSIS_HPP
