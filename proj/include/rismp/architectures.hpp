#ifndef RISMP_ARCHITECTURES_HPP
#define RISMP_ARCHITECTURES_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "rismp/netparams.hpp"
#include "rismp/types.hpp"

namespace rismp {

enum class ArchitectureFamily { single, fully, group, tree, forest };

const char* to_string(ArchitectureFamily family);
ArchitectureFamily architecture_family_from_string(const std::string& name);

/// RIS architecture: interconnection topology of the tunable network.
/// group_size is meaningful for the group and forest families and must
/// divide n_i; the other families fix it implicitly (1 for single, n_i
/// for fully/tree).
struct ArchitectureSpec {
  ArchitectureFamily family = ArchitectureFamily::single;
  int n_i = 1;
  int group_size = 1;

  void check() const;
  /// Size of one diagonal block of the tunable network.
  int block_size() const;
  int groups() const { return n_i / block_size(); }
  /// Whether entry (i, j) of the tunable matrix may be nonzero.
  bool allowed(int i, int j) const;
};

enum class RisParameterization { reactance, susceptance, scattering };

const char* to_string(RisParameterization p);

/// A reconfigurable-network state. One canonical matrix is stored per the
/// parameterization tag: X_I (Z_I = jX_I), B_I (Y_I = jB_I), or Theta.
/// X_I and B_I are real symmetric when feasible; the matrix is kept
/// complex so that infeasible states can be represented and validated.
struct RisConfiguration {
  ArchitectureSpec spec;
  RisParameterization param = RisParameterization::scattering;
  MatrixXcd values;
  double z0 = kDefaultZ0;

  /// Scattering matrix of the tunable network, derived from any
  /// parameterization.
  MatrixXcd theta() const;
  /// Impedance termination Z_I; susceptance and scattering states with a
  /// singular conversion raise SingularConversion.
  RisTermination termination() const;
};

struct ConstraintViolation {
  std::string constraint;
  double magnitude = 0.0;
};

struct ValidationReport {
  std::vector<ConstraintViolation> violations;

  bool ok() const { return violations.empty(); }
  std::string summary() const;
};

/// Checks the lossless-reciprocal constraints and the family's sparsity
/// pattern. Never throws; every violated constraint is listed with its
/// magnitude.
ValidationReport validate(const RisConfiguration& config, double tol = 1e-10);

/// Deterministic feasible state: phases for single, random symmetric X_I
/// for fully/group, tridiagonal-per-block B_I for tree/forest.
RisConfiguration random_feasible(const ArchitectureSpec& spec,
                                 std::uint64_t seed, double z0 = kDefaultZ0);

/// Theta = (Z_I + Z0 I)^-1 (Z_I - Z0 I).
MatrixXcd theta_from_impedance(const RisTermination& z_i, double z0);

/// Z_I = Z0 (I + Theta)(I - Theta)^-1. A scalar Theta = 1 maps to the
/// open-circuit sentinel; larger matrices with a unit eigenvalue are
/// rejected with SingularConversion.
RisTermination impedance_from_theta(const MatrixXcd& theta, double z0);

/// Theta for an admittance network Y_I = jB_I without inverting B_I:
/// (Y0 I + jB)^-1 (Y0 I - jB).
MatrixXcd theta_from_susceptance(const MatrixXcd& b_i, double z0);

/// Tunable circuit components behind a symmetric admittance matrix:
/// grounding admittances Y_n and interconnection admittances Y_{n,m}.
struct AdmittanceComponents {
  VectorXcd grounding;
  MatrixXcd interconnect;  // symmetric, zero diagonal
};

AdmittanceComponents components_from_admittance(const MatrixXcd& y_i);
MatrixXcd admittance_from_components(const AdmittanceComponents& c);

/// Nearest feasible state for the pattern constraints: symmetrize, mask,
/// drop imaginary parts of X/B; symmetric-unitary projection per block
/// for scattering states. Idempotent.
RisConfiguration project(const RisConfiguration& config,
                         const ArchitectureSpec& spec);

/// Nearest symmetric unitary matrix in Frobenius distance: the polar
/// factor of the symmetrized input.
MatrixXcd nearest_symmetric_unitary(const MatrixXcd& m);

}  // namespace rismp

#endif  // RISMP_ARCHITECTURES_HPP
