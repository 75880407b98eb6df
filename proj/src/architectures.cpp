#include "rismp/architectures.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/SVD>

namespace rismp {

namespace {

constexpr Complex kJ{0.0, 1.0};

double pattern_violation(const MatrixXcd& m, const ArchitectureSpec& spec) {
  double worst = 0.0;
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (!spec.allowed(i, j)) {
        worst = std::max(worst, std::abs(m(i, j)));
      }
    }
  }
  return worst;
}

MatrixXcd masked(const MatrixXcd& m, const ArchitectureSpec& spec) {
  MatrixXcd out = m;
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (!spec.allowed(i, j)) {
        out(i, j) = 0.0;
      }
    }
  }
  return out;
}

}  // namespace

const char* to_string(ArchitectureFamily family) {
  switch (family) {
    case ArchitectureFamily::single:
      return "single";
    case ArchitectureFamily::fully:
      return "fully";
    case ArchitectureFamily::group:
      return "group";
    case ArchitectureFamily::tree:
      return "tree";
    case ArchitectureFamily::forest:
      return "forest";
  }
  return "?";
}

ArchitectureFamily architecture_family_from_string(const std::string& name) {
  if (name == "single") return ArchitectureFamily::single;
  if (name == "fully") return ArchitectureFamily::fully;
  if (name == "group") return ArchitectureFamily::group;
  if (name == "tree") return ArchitectureFamily::tree;
  if (name == "forest") return ArchitectureFamily::forest;
  throw ConfigError("unknown architecture family: " + name);
}

const char* to_string(RisParameterization p) {
  switch (p) {
    case RisParameterization::reactance:
      return "reactance";
    case RisParameterization::susceptance:
      return "susceptance";
    case RisParameterization::scattering:
      return "scattering";
  }
  return "?";
}

void ArchitectureSpec::check() const {
  if (n_i < 1) {
    throw ConfigError("ArchitectureSpec: n_i must be >= 1");
  }
  if (family == ArchitectureFamily::group ||
      family == ArchitectureFamily::forest) {
    if (group_size < 1 || n_i % group_size != 0) {
      throw ConfigError("ArchitectureSpec: group size must divide n_i");
    }
  }
}

int ArchitectureSpec::block_size() const {
  switch (family) {
    case ArchitectureFamily::single:
      return 1;
    case ArchitectureFamily::fully:
    case ArchitectureFamily::tree:
      return n_i;
    case ArchitectureFamily::group:
    case ArchitectureFamily::forest:
      return group_size;
  }
  return 1;
}

bool ArchitectureSpec::allowed(int i, int j) const {
  const int b = block_size();
  if (i / b != j / b) {
    return false;
  }
  if (family == ArchitectureFamily::tree ||
      family == ArchitectureFamily::forest) {
    return std::abs(i - j) <= 1;
  }
  return true;
}

MatrixXcd RisConfiguration::theta() const {
  switch (param) {
    case RisParameterization::reactance:
      return reflection_of(kJ * values, z0);
    case RisParameterization::susceptance:
      return theta_from_susceptance(values, z0);
    case RisParameterization::scattering:
      return values;
  }
  return values;
}

RisTermination RisConfiguration::termination() const {
  switch (param) {
    case RisParameterization::reactance:
      return RisTermination::impedance(kJ * values);
    case RisParameterization::susceptance:
      return RisTermination::impedance(
          guarded_inverse(kJ * values, "RisConfiguration: jB_I"));
    case RisParameterization::scattering:
      return impedance_from_theta(values, z0);
  }
  return impedance_from_theta(values, z0);
}

std::string ValidationReport::summary() const {
  if (ok()) {
    return "feasible";
  }
  std::ostringstream out;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i) out << "; ";
    out << violations[i].constraint << " (" << violations[i].magnitude
        << ")";
  }
  return out.str();
}

ValidationReport validate(const RisConfiguration& config, double tol) {
  ValidationReport report;
  auto flag = [&](const std::string& what, double magnitude) {
    report.violations.push_back({what, magnitude});
  };

  try {
    config.spec.check();
  } catch (const ConfigError& e) {
    flag(e.what(), 0.0);
    return report;
  }
  const int n = config.spec.n_i;
  if (config.values.rows() != n || config.values.cols() != n) {
    flag("matrix shape does not match n_i", 0.0);
    return report;
  }
  const MatrixXcd& m = config.values;
  const double scale = std::max(1.0, m.norm());

  const bool bonly = config.spec.family == ArchitectureFamily::tree ||
                     config.spec.family == ArchitectureFamily::forest;
  if (bonly && config.param != RisParameterization::susceptance) {
    flag("tree/forest constraints are defined on B_I only", 0.0);
  }

  const double asym = (m - m.transpose()).norm();
  if (asym > tol * scale) {
    flag("symmetry", asym);
  }
  const double pat = pattern_violation(m, config.spec);
  if (pat > tol * scale) {
    flag("sparsity pattern", pat);
  }

  if (config.param == RisParameterization::scattering) {
    const double nonunitary =
        (m.adjoint() * m - MatrixXcd::Identity(n, n)).norm();
    if (nonunitary > tol * std::sqrt(double(n))) {
      flag("unitarity", nonunitary);
    }
  } else {
    const double imag = m.imag().norm();
    if (imag > tol * scale) {
      flag("realness", imag);
    }
  }
  return report;
}

RisConfiguration random_feasible(const ArchitectureSpec& spec,
                                 std::uint64_t seed, double z0) {
  spec.check();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  const int n = spec.n_i;

  RisConfiguration config;
  config.spec = spec;
  config.z0 = z0;

  if (spec.family == ArchitectureFamily::single) {
    std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
    config.param = RisParameterization::scattering;
    config.values = MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      config.values(i, i) = std::exp(kJ * phase(rng));
    }
    return config;
  }

  const bool bonly = spec.family == ArchitectureFamily::tree ||
                     spec.family == ArchitectureFamily::forest;
  const double scale = bonly ? 1.0 / z0 : z0;
  config.param = bonly ? RisParameterization::susceptance
                       : RisParameterization::reactance;
  MatrixXcd m = MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      if (spec.allowed(i, j)) {
        m(i, j) = m(j, i) = scale * uniform(rng);
      }
    }
  }
  config.values = m;
  return config;
}

MatrixXcd theta_from_impedance(const RisTermination& z_i, double z0) {
  return z_i.theta(z0);
}

RisTermination impedance_from_theta(const MatrixXcd& theta, double z0) {
  const int n = int(theta.rows());
  if (n == 1) {
    const Complex t = theta(0, 0);
    if (std::abs(1.0 - t) <= kRcondThreshold * (1.0 + std::abs(t))) {
      return RisTermination::open_circuit(1);
    }
    MatrixXcd z(1, 1);
    z(0, 0) = z0 * (1.0 + t) / (1.0 - t);
    return RisTermination::impedance(z);
  }
  const MatrixXcd eye = MatrixXcd::Identity(n, n);
  if (rcond(MatrixXcd(eye - theta)) < kRcondThreshold) {
    throw SingularConversion(
        "impedance_from_theta: Theta has a unit eigenvalue, Z_I diverges");
  }
  const MatrixXcd z =
      z0 * guarded_solve(MatrixXcd(eye - theta), MatrixXcd(eye + theta),
                         "impedance_from_theta: I - Theta");
  return RisTermination::impedance(z);
}

MatrixXcd theta_from_susceptance(const MatrixXcd& b_i, double z0) {
  const int n = int(b_i.rows());
  const double y0 = 1.0 / z0;
  const MatrixXcd eye = MatrixXcd::Identity(n, n);
  return guarded_solve(MatrixXcd(y0 * eye + kJ * b_i),
                       MatrixXcd(y0 * eye - kJ * b_i),
                       "theta_from_susceptance: Y0 I + jB");
}

AdmittanceComponents components_from_admittance(const MatrixXcd& y_i) {
  const int n = int(y_i.rows());
  if (y_i.cols() != n) {
    throw NotSymmetric("components_from_admittance: matrix not square");
  }
  const double asym = (y_i - y_i.transpose()).norm();
  if (asym > 1e-12 * std::max(1.0, y_i.norm())) {
    throw NotSymmetric("components_from_admittance: matrix not symmetric");
  }
  AdmittanceComponents c;
  c.interconnect = MatrixXcd::Zero(n, n);
  c.grounding = VectorXcd::Zero(n);
  for (int i = 0; i < n; ++i) {
    Complex row_sum = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      c.interconnect(i, j) = -y_i(i, j);
      row_sum += c.interconnect(i, j);
    }
    c.grounding(i) = y_i(i, i) - row_sum;
  }
  return c;
}

MatrixXcd admittance_from_components(const AdmittanceComponents& c) {
  const int n = int(c.grounding.size());
  MatrixXcd y = MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    Complex row_sum = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      y(i, j) = -c.interconnect(i, j);
      row_sum += c.interconnect(i, j);
    }
    y(i, i) = c.grounding(i) + row_sum;
  }
  return y;
}

MatrixXcd nearest_symmetric_unitary(const MatrixXcd& m) {
  const MatrixXcd sym = 0.5 * (m + m.transpose());
  Eigen::JacobiSVD<MatrixXcd> svd(
      sym, Eigen::ComputeFullU | Eigen::ComputeFullV);
  // Polar factor of a complex symmetric matrix; itself symmetric.
  return svd.matrixU() * svd.matrixV().adjoint();
}

RisConfiguration project(const RisConfiguration& config,
                         const ArchitectureSpec& spec) {
  spec.check();
  RisConfiguration out = config;
  out.spec = spec;
  const MatrixXcd sym = 0.5 * (config.values + config.values.transpose());

  if (config.param != RisParameterization::scattering) {
    out.values = masked(sym.real().cast<Complex>(), spec);
    return out;
  }

  const int n = spec.n_i;
  if (spec.family == ArchitectureFamily::single) {
    MatrixXcd t = MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      const Complex d = config.values(i, i);
      t(i, i) = std::abs(d) > 0.0 ? d / std::abs(d) : Complex(1.0, 0.0);
    }
    out.values = t;
    return out;
  }
  if (spec.family == ArchitectureFamily::fully ||
      spec.family == ArchitectureFamily::group) {
    const int b = spec.block_size();
    MatrixXcd t = MatrixXcd::Zero(n, n);
    for (int g = 0; g < spec.groups(); ++g) {
      t.block(g * b, g * b, b, b) =
          nearest_symmetric_unitary(sym.block(g * b, g * b, b, b));
    }
    out.values = t;
    return out;
  }
  // Tree/forest scattering states only get the pattern constraints; the
  // family's full constraint set lives in the susceptance form.
  out.values = masked(sym, spec);
  return out;
}

}  // namespace rismp
