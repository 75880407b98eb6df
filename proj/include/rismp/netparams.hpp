#ifndef RISMP_NETPARAMS_HPP
#define RISMP_NETPARAMS_HPP

#include <cstdint>
#include <optional>

#include "rismp/types.hpp"

namespace rismp {

enum class NetworkKind { Z, Y, S };

const char* to_string(NetworkKind kind);

/// An N-port parameter matrix tagged with its kind and port partition.
/// Blocks follow the port order (T, I, R).
class NetworkMatrix {
 public:
  NetworkMatrix(NetworkKind kind, MatrixXcd values, PortPartition partition,
                double z0 = kDefaultZ0);

  NetworkKind kind() const { return kind_; }
  const MatrixXcd& values() const { return values_; }
  const PortPartition& partition() const { return partition_; }
  double z0() const { return z0_; }
  double y0() const { return 1.0 / z0_; }

  MatrixXcd tt() const { return block(0, 0); }
  MatrixXcd ti() const { return block(0, 1); }
  MatrixXcd tr() const { return block(0, 2); }
  MatrixXcd it() const { return block(1, 0); }
  MatrixXcd ii() const { return block(1, 1); }
  MatrixXcd ir() const { return block(1, 2); }
  MatrixXcd rt() const { return block(2, 0); }
  MatrixXcd ri() const { return block(2, 1); }
  MatrixXcd rr() const { return block(2, 2); }

  MatrixXcd block(int row, int col) const;

 private:
  NetworkKind kind_;
  MatrixXcd values_;
  PortPartition partition_;
  double z0_;
};

/// Impedance termination of the RIS ports. The open-circuit state is an
/// explicit sentinel so that the limit Z_I -> inf is handled exactly
/// (Theta = I) instead of through a large-number approximation.
class RisTermination {
 public:
  static RisTermination open_circuit(int n_i);
  static RisTermination impedance(MatrixXcd z_i);

  bool is_open() const { return open_; }
  int size() const { return n_; }

  /// Impedance matrix; throws SingularConversion for the open sentinel.
  const MatrixXcd& z() const;
  /// Admittance matrix; the open sentinel maps to Y_I = 0 exactly.
  MatrixXcd y() const;
  /// Scattering matrix at z0; the open sentinel maps to Theta = I.
  MatrixXcd theta(double z0) const;

 private:
  RisTermination(bool open, int n, MatrixXcd z);

  bool open_;
  int n_;
  MatrixXcd z_;
};

/// Source, RIS, and load terminations of the N-port network.
/// z_t and z_r are diagonal; derived admittance/reflection views are
/// recomputed on demand.
class TerminationSet {
 public:
  TerminationSet(MatrixXcd z_t, RisTermination z_i, MatrixXcd z_r,
                 double z0 = kDefaultZ0);

  static TerminationSet matched(const PortPartition& p,
                                double z0 = kDefaultZ0);

  const MatrixXcd& z_t() const { return z_t_; }
  const RisTermination& z_i() const { return z_i_; }
  const MatrixXcd& z_r() const { return z_r_; }
  double z0() const { return z0_; }

  MatrixXcd y_t() const;
  MatrixXcd y_i() const { return z_i_.y(); }
  MatrixXcd y_r() const;

  MatrixXcd gamma_t() const;
  MatrixXcd theta() const { return z_i_.theta(z0_); }
  MatrixXcd gamma_r() const;

 private:
  MatrixXcd z_t_;
  RisTermination z_i_;
  MatrixXcd z_r_;
  double z0_;
};

/// Source excitation at the transmitter ports, canonically a voltage
/// vector; current- and wave-domain views are derived.
struct SourceExcitation {
  VectorXcd v_s;

  VectorXcd i_s(const TerminationSet& terms) const;
  VectorXcd b_s(const TerminationSet& terms) const;
};

/// Reciprocal condition number from singular values.
double rcond(const MatrixXcd& m);

/// Inverse guarded by the reciprocal-condition-number threshold.
MatrixXcd guarded_inverse(const MatrixXcd& m, const char* context);

/// Solves m * x = rhs with the same singularity guard.
MatrixXcd guarded_solve(const MatrixXcd& m, const MatrixXcd& rhs,
                        const char* context);

NetworkMatrix z_to_s(const NetworkMatrix& z);
NetworkMatrix s_to_z(const NetworkMatrix& s);
NetworkMatrix z_to_y(const NetworkMatrix& z);
NetworkMatrix y_to_z(const NetworkMatrix& y);

/// (Z + Z0 I)^-1 (Z - Z0 I); reflection coefficient of a termination.
MatrixXcd reflection_of(const MatrixXcd& zterm, double z0);

struct SourceEquivalents {
  VectorXcd i_s;
  VectorXcd b_s;
};

SourceEquivalents source_equivalents(const VectorXcd& v_s,
                                     const MatrixXcd& z_t, double z0);

/// Deterministic random Z fixture with positive-definite Hermitian part,
/// guaranteeing passivity and well-posed conversions.
NetworkMatrix random_passive_network(const PortPartition& partition,
                                     std::uint64_t seed,
                                     double z0 = kDefaultZ0);

}  // namespace rismp

#endif  // RISMP_NETPARAMS_HPP
