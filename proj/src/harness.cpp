#include "rismp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "rismp/coupling.hpp"

namespace rismp {

namespace {

using nlohmann::json;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string architecture_name(const ArchitectureSpec& spec) {
  std::string name = to_string(spec.family);
  if (spec.family == ArchitectureFamily::group ||
      spec.family == ArchitectureFamily::forest) {
    name += std::to_string(spec.group_size);
  }
  return name;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw ConfigError("cannot open output file: " + path);
  }
  return out;
}

}  // namespace

double pathloss(double d, double l0_db, double alpha) {
  if (d <= 0.0) {
    throw InvalidGeometry("pathloss: distance must be positive");
  }
  return std::pow(10.0, l0_db / 10.0) * std::pow(d, -alpha);
}

double distance(const std::array<double, 2>& a,
                const std::array<double, 2>& b) {
  return std::hypot(a[0] - b[0], a[1] - b[1]);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint32_t n_i,
                          std::uint32_t arch_index, std::uint32_t trial) {
  std::uint64_t s = splitmix64(master);
  s = splitmix64(s ^ n_i);
  s = splitmix64(s ^ arch_index);
  s = splitmix64(s ^ trial);
  return s;
}

SynthesizedScenario synthesize_scenario(const ScenarioConfig& cfg, int n_i,
                                        std::uint64_t trial_seed) {
  if (n_i < 1) {
    throw ConfigError("synthesize_scenario: n_i must be >= 1");
  }
  const double l_ri =
      pathloss(distance(cfg.ris, cfg.rx), cfg.l0_db, cfg.alpha_ri);
  const double l_it =
      pathloss(distance(cfg.tx, cfg.ris), cfg.l0_db, cfg.alpha_it);

  std::mt19937_64 rng(trial_seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto draw_iid = [&](int rows, int cols, double variance) {
    const double s = std::sqrt(variance / 2.0);
    MatrixXcd m(rows, cols);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) {
        m(i, j) = Complex(s * gauss(rng), s * gauss(rng));
      }
    }
    return m;
  };

  const MatrixXcd s_ri = draw_iid(cfg.n_r, n_i, l_ri);
  const MatrixXcd s_it = draw_iid(n_i, cfg.n_t, l_it);

  const double z0 = kDefaultZ0;
  const MatrixXcd z_rt = MatrixXcd::Zero(cfg.n_r, cfg.n_t);
  const MatrixXcd z_ri = 2.0 * z0 * s_ri;
  const MatrixXcd z_it = 2.0 * z0 * s_it;
  const UnilateralMappings m = map_matched(z_rt, z_ri, z_it, z0);

  SynthesizedScenario out;
  out.z_form.blocks = MatchedBlocks{NetworkKind::Z, z_rt, z_ri, z_it};
  out.y_form.blocks = MatchedBlocks{NetworkKind::Y, m.y_rt, m.y_ri, m.y_it};
  out.s_form.blocks = MatchedBlocks{NetworkKind::S, m.s_rt, m.s_ri, m.s_it};
  for (MIMOScenario* scn : {&out.z_form, &out.y_form, &out.s_form}) {
    scn->p_t = cfg.p_t;
    scn->z0 = z0;
  }
  return out;
}

double SweepResult::nonconverged_fraction() const {
  if (records.empty()) return 0.0;
  int bad = 0;
  for (const ExperimentRecord& r : records) {
    if (!r.converged) ++bad;
  }
  return double(bad) / double(records.size());
}

SweepResult run_sweep(const ScenarioConfig& cfg) {
  {
    const std::vector<std::string> errors = validate_config(cfg);
    if (!errors.empty()) {
      std::string msg = "invalid config:";
      for (const std::string& e : errors) msg += "\n  " + e;
      throw ConfigError(msg);
    }
  }

  struct Row {
    int n_i;
    int arch_index;
    int trial;
  };
  std::vector<Row> rows;
  for (int n_i : cfg.ni_list) {
    for (int a = 0; a < int(cfg.architectures.size()); ++a) {
      for (int t = 0; t < cfg.trials; ++t) {
        rows.push_back(Row{n_i, a, t});
      }
    }
  }

  SweepResult result;
  result.records.resize(rows.size());

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&]() {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= rows.size()) return;
      try {
        const Row& row = rows[idx];
        ArchitectureSpec spec = cfg.architectures[row.arch_index];
        spec.n_i = row.n_i;
        if (spec.family == ArchitectureFamily::single) {
          spec.group_size = 1;
        } else if (spec.family == ArchitectureFamily::fully ||
                   spec.family == ArchitectureFamily::tree) {
          spec.group_size = row.n_i;
        }
        spec.check();

        const std::uint64_t channel_seed = derive_seed(
            cfg.master_seed, std::uint32_t(row.n_i), kChannelStream,
            std::uint32_t(row.trial));
        const SynthesizedScenario scn =
            synthesize_scenario(cfg, row.n_i, channel_seed);

        SolveOptions opts = cfg.solve;
        opts.seed = derive_seed(cfg.master_seed, std::uint32_t(row.n_i),
                                std::uint32_t(row.arch_index),
                                std::uint32_t(row.trial));

        const auto start = std::chrono::steady_clock::now();
        BeamformingSolution sol;
        if (spec.family == ArchitectureFamily::tree ||
            spec.family == ArchitectureFamily::forest) {
          sol = optimize_y_forest(scn.y_form, spec, opts);
        } else if (cfg.coupling) {
          ArrayGeometry geom;
          geom.n_i = row.n_i;
          geom.frequency = cfg.frequency;
          geom.spacing = geom.wavelength() / 4.0;
          geom.dipole_length = geom.wavelength() / 4.0;
          MIMOScenario z_scn = scn.z_form;
          z_scn.z_ii = ris_coupling_matrix(geom, z_scn.z0);
          sol = optimize_z_group_mc(z_scn, spec, opts);
        } else {
          sol = optimize_s_group(scn.s_form, spec, opts);
        }
        const auto stop = std::chrono::steady_clock::now();

        ExperimentRecord rec;
        rec.n_i = row.n_i;
        rec.architecture = architecture_name(spec);
        rec.coupling = cfg.coupling &&
                       spec.family != ArchitectureFamily::tree &&
                       spec.family != ArchitectureFamily::forest;
        rec.trial = row.trial;
        rec.seed = opts.seed;
        rec.p_r = sol.power();
        rec.p_r_db = 10.0 * std::log10(std::max(rec.p_r, 1e-300));
        rec.iterations = sol.iterations();
        rec.converged = sol.converged;
        rec.wall_time_s =
            std::chrono::duration<double>(stop - start).count();
        result.records[idx] = rec;
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  const unsigned n_workers = std::max(
      1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                             unsigned(rows.size())));
  std::vector<std::thread> threads;
  threads.reserve(n_workers);
  for (unsigned w = 0; w < n_workers; ++w) threads.emplace_back(worker);
  for (std::thread& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);

  // Rows are already ordered by (n_i, architecture, trial) construction.
  std::map<std::pair<int, std::string>, std::vector<double>> groups;
  std::vector<std::pair<int, std::string>> order;
  std::map<std::pair<int, std::string>, int> bad;
  for (const ExperimentRecord& r : result.records) {
    const auto key = std::make_pair(r.n_i, r.architecture);
    if (groups.find(key) == groups.end()) order.push_back(key);
    groups[key].push_back(r.p_r);
    if (!r.converged) ++bad[key];
  }
  for (const auto& key : order) {
    const std::vector<double>& p = groups[key];
    SweepSummaryRow row;
    row.n_i = key.first;
    row.architecture = key.second;
    row.trials = int(p.size());
    double sum = 0.0, sum2 = 0.0;
    for (double v : p) {
      sum += v;
      sum2 += v * v;
    }
    row.mean_p_r = sum / p.size();
    if (p.size() > 1) {
      const double var = std::max(
          0.0, (sum2 - p.size() * row.mean_p_r * row.mean_p_r) /
                   (double(p.size()) - 1.0));
      row.stderr_p_r = std::sqrt(var / double(p.size()));
    }
    row.nonconverged = bad.count(key) ? bad[key] : 0;
    result.summary.push_back(row);
  }

  if (!cfg.output_path.empty()) {
    if (cfg.format == "json") {
      write_records_json(cfg.output_path, result, cfg.master_seed);
    } else {
      write_records_csv(cfg.output_path, result, cfg.master_seed);
    }
  }
  return result;
}

std::vector<ScatterRow> scatter_sweep(const std::vector<int>& ni_list,
                                      int trials, std::uint64_t seed,
                                      FadingModel model) {
  std::vector<ScatterRow> rows;
  for (int n_i : ni_list) {
    const MonteCarloPowers mc = monte_carlo_powers(
        n_i, trials, derive_seed(seed, std::uint32_t(n_i), 0, 0), model);
    ScatterRow row;
    row.n_i = n_i;
    row.mean_p_r = mc.mean_exact;
    row.mean_p_r_approx = mc.mean_approx;
    row.stderr_p_r = mc.stderr_exact;
    row.delta_empirical = mc.empirical_delta();
    row.delta_closed = los_delta(n_i);
    rows.push_back(row);
  }
  return rows;
}

std::vector<std::string> validate_config(const ScenarioConfig& cfg) {
  std::vector<std::string> errors;
  if (cfg.n_t < 1) errors.push_back("n_t must be >= 1");
  if (cfg.n_r < 1) errors.push_back("n_r must be >= 1");
  if (cfg.ni_list.empty()) errors.push_back("ni_list must be nonempty");
  for (int n : cfg.ni_list) {
    if (n < 1) errors.push_back("ni_list entries must be >= 1");
  }
  if (cfg.trials < 1) errors.push_back("trials must be >= 1");
  if (cfg.p_t <= 0.0) errors.push_back("p_t must be positive");
  if (cfg.frequency <= 0.0) errors.push_back("frequency must be positive");
  if (cfg.format != "csv" && cfg.format != "json") {
    errors.push_back("format must be csv or json");
  }
  if (distance(cfg.ris, cfg.rx) <= 0.0) {
    errors.push_back("ris and rx positions must differ");
  }
  if (distance(cfg.tx, cfg.ris) <= 0.0) {
    errors.push_back("tx and ris positions must differ");
  }
  if (cfg.architectures.empty()) {
    errors.push_back("architectures must be nonempty");
  }
  for (const ArchitectureSpec& a : cfg.architectures) {
    if (a.family == ArchitectureFamily::group ||
        a.family == ArchitectureFamily::forest) {
      if (a.group_size < 1) {
        errors.push_back("group_size must be >= 1 for " +
                         std::string(to_string(a.family)));
        continue;
      }
      for (int n : cfg.ni_list) {
        if (n >= 1 && n % a.group_size != 0) {
          errors.push_back("group_size " + std::to_string(a.group_size) +
                           " must divide n_i " + std::to_string(n));
        }
      }
    }
    if (cfg.coupling && (a.family == ArchitectureFamily::tree ||
                         a.family == ArchitectureFamily::forest)) {
      errors.push_back(
          "coupling is only supported for single/group/fully architectures");
    }
  }
  if (cfg.max_nonconverged_fraction < 0.0 ||
      cfg.max_nonconverged_fraction > 1.0) {
    errors.push_back("max_nonconverged_fraction must be in [0, 1]");
  }
  if (cfg.solve.max_outer < 1) errors.push_back("solver max_outer must be >= 1");
  if (cfg.solve.tol <= 0.0) errors.push_back("solver tol must be positive");
  if (cfg.solve.inner_budget < 1) {
    errors.push_back("solver inner_budget must be >= 1");
  }
  if (cfg.solve.restarts < 1) errors.push_back("solver restarts must be >= 1");
  return errors;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("config file not found: " + path);
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config file " + path + " is not valid JSON: " +
                      e.what());
  }

  ScenarioConfig cfg;
  std::vector<std::string> errors;

  const std::vector<std::string> known{
      "positions", "n_t", "n_r", "ni_list", "l0_db", "alpha_ri", "alpha_it",
      "p_t", "frequency", "architectures", "coupling", "trials", "seed",
      "out", "format", "max_nonconverged_fraction", "solver"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
      errors.push_back("unknown key: " + it.key());
    }
  }

  auto read_position = [&](const json& node, const std::string& name,
                           std::array<double, 2>& out) {
    if (!node.is_array() || node.size() != 2 || !node[0].is_number() ||
        !node[1].is_number()) {
      errors.push_back("positions." + name + " must be [x, y]");
      return;
    }
    out = {node[0].get<double>(), node[1].get<double>()};
  };

  try {
    if (j.contains("positions")) {
      const json& p = j["positions"];
      if (p.contains("tx")) read_position(p["tx"], "tx", cfg.tx);
      if (p.contains("ris")) read_position(p["ris"], "ris", cfg.ris);
      if (p.contains("rx")) read_position(p["rx"], "rx", cfg.rx);
    }
    if (j.contains("n_t")) cfg.n_t = j["n_t"].get<int>();
    if (j.contains("n_r")) cfg.n_r = j["n_r"].get<int>();
    if (j.contains("ni_list")) {
      cfg.ni_list = j["ni_list"].get<std::vector<int>>();
    }
    if (j.contains("l0_db")) cfg.l0_db = j["l0_db"].get<double>();
    if (j.contains("alpha_ri")) cfg.alpha_ri = j["alpha_ri"].get<double>();
    if (j.contains("alpha_it")) cfg.alpha_it = j["alpha_it"].get<double>();
    if (j.contains("p_t")) cfg.p_t = j["p_t"].get<double>();
    if (j.contains("frequency")) cfg.frequency = j["frequency"].get<double>();
    if (j.contains("coupling")) cfg.coupling = j["coupling"].get<bool>();
    if (j.contains("trials")) cfg.trials = j["trials"].get<int>();
    if (j.contains("seed")) cfg.master_seed = j["seed"].get<std::uint64_t>();
    if (j.contains("out")) cfg.output_path = j["out"].get<std::string>();
    if (j.contains("format")) cfg.format = j["format"].get<std::string>();
    if (j.contains("max_nonconverged_fraction")) {
      cfg.max_nonconverged_fraction =
          j["max_nonconverged_fraction"].get<double>();
    }
    if (j.contains("solver")) {
      const json& s = j["solver"];
      if (s.contains("max_outer")) {
        cfg.solve.max_outer = s["max_outer"].get<int>();
      }
      if (s.contains("tol")) cfg.solve.tol = s["tol"].get<double>();
      if (s.contains("inner_budget")) {
        cfg.solve.inner_budget = s["inner_budget"].get<int>();
      }
      if (s.contains("restarts")) {
        cfg.solve.restarts = s["restarts"].get<int>();
      }
    }
    if (j.contains("architectures")) {
      cfg.architectures.clear();
      for (const json& a : j["architectures"]) {
        ArchitectureSpec spec;
        if (!a.contains("family") || !a["family"].is_string()) {
          errors.push_back("architecture entries need a family string");
          continue;
        }
        try {
          spec.family = architecture_family_from_string(
              a["family"].get<std::string>());
        } catch (const ConfigError& e) {
          errors.push_back(e.what());
          continue;
        }
        if (a.contains("group_size")) {
          spec.group_size = a["group_size"].get<int>();
        }
        spec.n_i = std::max(1, spec.group_size);
        cfg.architectures.push_back(spec);
      }
    }
  } catch (const json::exception& e) {
    errors.push_back(std::string("malformed value: ") + e.what());
  }

  const std::vector<std::string> more = validate_config(cfg);
  errors.insert(errors.end(), more.begin(), more.end());
  if (!errors.empty()) {
    std::string msg = "invalid config " + path + ":";
    for (const std::string& e : errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  return cfg;
}

void write_records_csv(const std::string& path, const SweepResult& result,
                       std::uint64_t master_seed) {
  std::ofstream out = open_output(path);
  out << "# rismp sweep schema v1\n";
  out << "# master_seed=" << master_seed << "\n";
  out << "n_i,architecture,coupling,trial,seed,p_r_w,p_r_db,iterations,"
         "converged,wall_time_s\n";
  for (const ExperimentRecord& r : result.records) {
    out << r.n_i << ',' << r.architecture << ',' << (r.coupling ? 1 : 0)
        << ',' << r.trial << ',' << r.seed << ',' << format_double(r.p_r)
        << ',' << format_double(r.p_r_db) << ',' << r.iterations << ','
        << (r.converged ? 1 : 0) << ',' << format_double(r.wall_time_s)
        << '\n';
  }
}

void write_records_json(const std::string& path, const SweepResult& result,
                        std::uint64_t master_seed) {
  json j;
  j["schema"] = "rismp sweep v1";
  j["master_seed"] = master_seed;
  j["records"] = json::array();
  for (const ExperimentRecord& r : result.records) {
    json rec;
    rec["n_i"] = r.n_i;
    rec["architecture"] = r.architecture;
    rec["coupling"] = r.coupling;
    rec["trial"] = r.trial;
    rec["seed"] = r.seed;
    rec["p_r_w"] = r.p_r;
    rec["p_r_db"] = r.p_r_db;
    rec["iterations"] = r.iterations;
    rec["converged"] = r.converged;
    rec["wall_time_s"] = r.wall_time_s;
    j["records"].push_back(rec);
  }
  j["summary"] = json::array();
  for (const SweepSummaryRow& s : result.summary) {
    json row;
    row["n_i"] = s.n_i;
    row["architecture"] = s.architecture;
    row["mean_p_r"] = s.mean_p_r;
    row["stderr_p_r"] = s.stderr_p_r;
    row["nonconverged"] = s.nonconverged;
    row["trials"] = s.trials;
    j["summary"].push_back(row);
  }
  std::ofstream out = open_output(path);
  out << j.dump(2) << '\n';
}

void write_scatter_csv(const std::string& path,
                       const std::vector<ScatterRow>& rows,
                       std::uint64_t master_seed) {
  std::ofstream out = open_output(path);
  out << "# rismp scatter schema v1\n";
  out << "# master_seed=" << master_seed << "\n";
  out << "n_i,mean_p_r,mean_p_r_approx,stderr_p_r,delta_empirical,"
         "delta_closed\n";
  for (const ScatterRow& r : rows) {
    out << r.n_i << ',' << format_double(r.mean_p_r) << ','
        << format_double(r.mean_p_r_approx) << ','
        << format_double(r.stderr_p_r) << ','
        << format_double(r.delta_empirical) << ','
        << format_double(r.delta_closed) << '\n';
  }
}

void write_scatter_json(const std::string& path,
                        const std::vector<ScatterRow>& rows,
                        std::uint64_t master_seed) {
  json j;
  j["schema"] = "rismp scatter v1";
  j["master_seed"] = master_seed;
  j["rows"] = json::array();
  for (const ScatterRow& r : rows) {
    json row;
    row["n_i"] = r.n_i;
    row["mean_p_r"] = r.mean_p_r;
    row["mean_p_r_approx"] = r.mean_p_r_approx;
    row["stderr_p_r"] = r.stderr_p_r;
    row["delta_empirical"] = r.delta_empirical;
    row["delta_closed"] = r.delta_closed;
    j["rows"].push_back(row);
  }
  std::ofstream out = open_output(path);
  out << j.dump(2) << '\n';
}

}  // namespace rismp
