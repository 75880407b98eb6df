#include <cstdlib>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rismp/channel.hpp"
#include "rismp/harness.hpp"
#include "rismp/netparams.hpp"

namespace {

using namespace rismp;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

std::uint64_t env_seed_or(std::uint64_t fallback) {
  const char* env = std::getenv("RISMP_SEED");
  if (env == nullptr || *env == '\0') return fallback;
  try {
    return std::stoull(env);
  } catch (const std::exception&) {
    throw ConfigError(std::string("RISMP_SEED is not an integer: ") + env);
  }
}

/// Largest entrywise gap between the Z/Y/S evaluations of the exact
/// channel on random passive fixtures with random RIS terminations.
double equivalence_gap(int trials, std::uint64_t seed) {
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t s = derive_seed(seed, 0, 0, std::uint32_t(t));
    const PortPartition p{2, 4, 2};
    const NetworkMatrix z = random_passive_network(p, s);

    std::mt19937_64 rng(derive_seed(seed, 1, 0, std::uint32_t(t)));
    std::uniform_real_distribution<double> real(20.0, 80.0);
    std::uniform_real_distribution<double> reactance(-60.0, 60.0);
    MatrixXcd z_t = MatrixXcd::Zero(p.n_t, p.n_t);
    MatrixXcd z_r = MatrixXcd::Zero(p.n_r, p.n_r);
    for (int i = 0; i < p.n_t; ++i) {
      z_t(i, i) = Complex(real(rng), reactance(rng));
    }
    for (int i = 0; i < p.n_r; ++i) {
      z_r(i, i) = Complex(real(rng), reactance(rng));
    }
    MatrixXcd x_i = MatrixXcd::Zero(p.n_i, p.n_i);
    for (int i = 0; i < p.n_i; ++i) {
      for (int j = 0; j <= i; ++j) {
        x_i(i, j) = x_i(j, i) = Complex(0.0, reactance(rng));
      }
    }
    const TerminationSet terms(z_t, RisTermination::impedance(x_i), z_r);

    const ChannelMatrix hz = general_channel(NetworkKind::Z, z, terms);
    const ChannelMatrix hy =
        general_channel(NetworkKind::Y, z_to_y(z), terms);
    const ChannelMatrix hs =
        general_channel(NetworkKind::S, z_to_s(z), terms);
    worst = std::max(worst, (hz.h - hy.h).cwiseAbs().maxCoeff());
    worst = std::max(worst, (hz.h - hs.h).cwiseAbs().maxCoeff());
  }
  return worst;
}

std::vector<int> parse_ni_list(const std::string& csv) {
  std::vector<int> out;
  std::string token;
  std::istringstream in(csv);
  while (std::getline(in, token, ',')) {
    if (token.empty()) continue;
    out.push_back(std::stoi(token));
  }
  if (out.empty()) {
    throw ConfigError("--ni-list must contain at least one integer");
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiport RIS channel models and link simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string format = "csv";
  std::string arch;
  std::string coupling_flag;
  std::string ni_csv;
  std::uint64_t seed = 1;
  int trials = 0;

  CLI::App* equiv = app.add_subcommand(
      "equiv-check", "Cross-check Z/Y/S exact-channel agreement");
  equiv->add_option("--trials", trials, "Number of random fixtures")
      ->default_val(100);
  equiv->add_option("--seed", seed, "Master seed");

  CLI::App* scatter = app.add_subcommand(
      "scatter", "Structural-scattering Monte Carlo sweep");
  scatter->add_option("--ni-list", ni_csv, "Comma-separated element counts")
      ->default_val("16,64,256");
  scatter->add_option("--trials", trials, "Trials per point")
      ->default_val(1000);
  scatter->add_option("--seed", seed, "Master seed");
  scatter->add_option("--out", out_path, "Output file");
  scatter->add_option("--format", format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  CLI::App* optimize = app.add_subcommand(
      "optimize", "Beamforming sweep over architectures and sizes");
  optimize->add_option("--config", config_path, "JSON scenario config")
      ->required();
  CLI::Option* opt_seed = optimize->add_option("--seed", seed, "Master seed");
  optimize->add_option("--out", out_path, "Output file override");
  optimize->add_option("--trials", trials, "Trials override");
  optimize->add_option("--ni-list", ni_csv, "Element-count override");
  optimize->add_option("--arch", arch,
                       "Restrict to one architecture (family name)");
  optimize->add_option("--coupling", coupling_flag, "on or off")
      ->check(CLI::IsMember({"on", "off"}));
  optimize->add_option("--format", format, "csv or json override")
      ->check(CLI::IsMember({"csv", "json"}));

  CLI::App* validate = app.add_subcommand(
      "validate-config", "Parse and validate a scenario config");
  validate->add_option("--config", config_path, "JSON scenario config")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (equiv->parsed()) {
      if (!equiv->count("--seed")) seed = env_seed_or(seed);
      const double gap = equivalence_gap(trials, seed);
      std::cout << "fixtures=" << trials << " max_gap=" << gap << "\n";
      if (gap > 1e-9) {
        std::cerr << "equivalence gap exceeds 1e-9\n";
        return kExitRuntime;
      }
      return kExitOk;
    }

    if (scatter->parsed()) {
      if (!scatter->count("--seed")) seed = env_seed_or(seed);
      const std::vector<int> ni_list = parse_ni_list(ni_csv);
      const std::vector<ScatterRow> rows = scatter_sweep(
          ni_list, trials, seed, FadingModel::los_random_phase);
      if (!out_path.empty()) {
        if (format == "json") {
          write_scatter_json(out_path, rows, seed);
        } else {
          write_scatter_csv(out_path, rows, seed);
        }
      }
      std::cout << "n_i mean_p_r delta_empirical delta_closed\n";
      for (const ScatterRow& r : rows) {
        std::cout << r.n_i << ' ' << r.mean_p_r << ' ' << r.delta_empirical
                  << ' ' << r.delta_closed << "\n";
      }
      return kExitOk;
    }

    if (optimize->parsed()) {
      ScenarioConfig cfg = load_config(config_path);
      cfg.master_seed = env_seed_or(cfg.master_seed);
      if (opt_seed->count()) cfg.master_seed = seed;
      if (optimize->count("--out")) cfg.output_path = out_path;
      if (optimize->count("--trials")) cfg.trials = trials;
      if (optimize->count("--ni-list")) cfg.ni_list = parse_ni_list(ni_csv);
      if (optimize->count("--format")) cfg.format = format;
      if (optimize->count("--coupling")) cfg.coupling = coupling_flag == "on";
      if (optimize->count("--arch")) {
        const ArchitectureFamily family =
            architecture_family_from_string(arch);
        std::vector<ArchitectureSpec> kept;
        for (const ArchitectureSpec& a : cfg.architectures) {
          if (a.family == family) kept.push_back(a);
        }
        if (kept.empty()) {
          throw ConfigError("--arch " + arch +
                            " matches no configured architecture");
        }
        cfg.architectures = kept;
      }
      const std::vector<std::string> errors = validate_config(cfg);
      if (!errors.empty()) {
        std::string msg = "invalid config after overrides:";
        for (const std::string& e : errors) msg += "\n  " + e;
        throw ConfigError(msg);
      }

      const SweepResult result = run_sweep(cfg);
      std::cout << "n_i architecture mean_p_r_w stderr_p_r_w nonconverged\n";
      for (const SweepSummaryRow& s : result.summary) {
        std::cout << s.n_i << ' ' << s.architecture << ' ' << s.mean_p_r
                  << ' ' << s.stderr_p_r << ' ' << s.nonconverged << '/'
                  << s.trials << "\n";
      }
      if (result.nonconverged_fraction() > cfg.max_nonconverged_fraction) {
        std::cerr << "nonconverged fraction "
                  << result.nonconverged_fraction() << " exceeds "
                  << cfg.max_nonconverged_fraction << "\n";
        return kExitRuntime;
      }
      return kExitOk;
    }

    if (validate->parsed()) {
      load_config(config_path);
      std::cout << "config ok: " << config_path << "\n";
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
