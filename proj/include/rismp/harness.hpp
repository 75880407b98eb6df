#ifndef RISMP_HARNESS_HPP
#define RISMP_HARNESS_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "rismp/analysis.hpp"
#include "rismp/optimize.hpp"
#include "rismp/types.hpp"

namespace rismp {

/// One experiment recipe: geometry, link budget, fading, architectures,
/// and orchestration knobs. Loaded from a JSON file; see load_config.
struct ScenarioConfig {
  std::array<double, 2> tx{0.0, 0.0};
  std::array<double, 2> ris{50.0, 2.0};
  std::array<double, 2> rx{52.0, 0.0};
  int n_t = 2;
  int n_r = 2;
  std::vector<int> ni_list{16};
  double l0_db = -30.0;
  double alpha_ri = 2.8;  // RIS-to-receiver exponent
  double alpha_it = 2.0;  // transmitter-to-RIS exponent
  double p_t = 0.01;      // W
  double frequency = 28e9;
  std::vector<ArchitectureSpec> architectures;
  bool coupling = false;
  int trials = 100;
  std::uint64_t master_seed = 1;
  std::string output_path;
  std::string format = "csv";
  double max_nonconverged_fraction = 0.05;
  SolveOptions solve;
};

/// Linear gain 10^(L0/10) * d^-alpha.
double pathloss(double d, double l0_db, double alpha);

double distance(const std::array<double, 2>& a,
                const std::array<double, 2>& b);

/// The same physical draw expressed in all three parameter kinds,
/// consistent through the matched mappings (Z_RT = 0, obstructed direct
/// path; S_RT = -S_RI S_IT).
struct SynthesizedScenario {
  MIMOScenario z_form;
  MIMOScenario y_form;
  MIMOScenario s_form;
};

SynthesizedScenario synthesize_scenario(const ScenarioConfig& cfg, int n_i,
                                        std::uint64_t trial_seed);

/// Deterministic substream id for (master seed, n_i, architecture index,
/// trial index); architecture index kMaxArch marks the shared channel
/// draw of a trial so every architecture sees the same channel.
inline constexpr std::uint32_t kChannelStream = 0xffffffffu;
std::uint64_t derive_seed(std::uint64_t master, std::uint32_t n_i,
                          std::uint32_t arch_index, std::uint32_t trial);

struct ExperimentRecord {
  int n_i = 0;
  std::string architecture;
  bool coupling = false;
  int trial = 0;
  std::uint64_t seed = 0;
  double p_r = 0.0;     // W
  double p_r_db = 0.0;  // 10 log10(P/1W)
  int iterations = 0;
  bool converged = false;
  double wall_time_s = 0.0;
};

struct SweepSummaryRow {
  int n_i = 0;
  std::string architecture;
  double mean_p_r = 0.0;
  double stderr_p_r = 0.0;
  int nonconverged = 0;
  int trials = 0;
};

struct SweepResult {
  std::vector<ExperimentRecord> records;
  std::vector<SweepSummaryRow> summary;

  double nonconverged_fraction() const;
};

/// Optimization sweep over (n_i, architecture, trial); writes the
/// records to cfg.output_path when set (csv or json per cfg.format).
SweepResult run_sweep(const ScenarioConfig& cfg);

/// Structural-scattering sweep rows for the LoS study.
struct ScatterRow {
  int n_i = 0;
  double mean_p_r = 0.0;
  double mean_p_r_approx = 0.0;
  double stderr_p_r = 0.0;
  double delta_empirical = 0.0;
  double delta_closed = 0.0;
};

std::vector<ScatterRow> scatter_sweep(const std::vector<int>& ni_list,
                                      int trials, std::uint64_t seed,
                                      FadingModel model);

/// All schema violations in the config, empty when valid.
std::vector<std::string> validate_config(const ScenarioConfig& cfg);

/// Parses and validates a JSON config file; throws ConfigError carrying
/// every violation at once.
ScenarioConfig load_config(const std::string& path);

void write_records_csv(const std::string& path, const SweepResult& result,
                       std::uint64_t master_seed);
void write_records_json(const std::string& path, const SweepResult& result,
                        std::uint64_t master_seed);
void write_scatter_csv(const std::string& path,
                       const std::vector<ScatterRow>& rows,
                       std::uint64_t master_seed);
void write_scatter_json(const std::string& path,
                        const std::vector<ScatterRow>& rows,
                        std::uint64_t master_seed);

}  // namespace rismp

#endif  // RISMP_HARNESS_HPP
