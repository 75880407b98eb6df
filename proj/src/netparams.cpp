#include "rismp/netparams.hpp"

#include <random>

#include <Eigen/SVD>

namespace rismp {

const char* to_string(NetworkKind kind) {
  switch (kind) {
    case NetworkKind::Z:
      return "Z";
    case NetworkKind::Y:
      return "Y";
    case NetworkKind::S:
      return "S";
  }
  return "?";
}

NetworkMatrix::NetworkMatrix(NetworkKind kind, MatrixXcd values,
                             PortPartition partition, double z0)
    : kind_(kind),
      values_(std::move(values)),
      partition_(partition),
      z0_(z0) {
  partition_.check();
  const int n = partition_.total();
  if (values_.rows() != n || values_.cols() != n) {
    throw ConfigError("NetworkMatrix: matrix side does not match partition");
  }
  if (!(z0_ > 0.0)) {
    throw ConfigError("NetworkMatrix: z0 must be positive");
  }
}

MatrixXcd NetworkMatrix::block(int row, int col) const {
  const int sizes[3] = {partition_.n_t, partition_.n_i, partition_.n_r};
  const int offs[3] = {0, partition_.n_t, partition_.n_t + partition_.n_i};
  return values_.block(offs[row], offs[col], sizes[row], sizes[col]);
}

RisTermination::RisTermination(bool open, int n, MatrixXcd z)
    : open_(open), n_(n), z_(std::move(z)) {}

RisTermination RisTermination::open_circuit(int n_i) {
  return RisTermination(true, n_i, MatrixXcd());
}

RisTermination RisTermination::impedance(MatrixXcd z_i) {
  if (z_i.rows() != z_i.cols()) {
    throw ConfigError("RisTermination: impedance matrix must be square");
  }
  const int n = static_cast<int>(z_i.rows());
  return RisTermination(false, n, std::move(z_i));
}

const MatrixXcd& RisTermination::z() const {
  if (open_) {
    throw SingularConversion(
        "RisTermination: open-circuit sentinel has no finite impedance");
  }
  return z_;
}

MatrixXcd RisTermination::y() const {
  if (open_) {
    return MatrixXcd::Zero(n_, n_);
  }
  return guarded_inverse(z_, "RisTermination::y");
}

MatrixXcd RisTermination::theta(double z0) const {
  if (open_) {
    return MatrixXcd::Identity(n_, n_);
  }
  return reflection_of(z_, z0);
}

TerminationSet::TerminationSet(MatrixXcd z_t, RisTermination z_i,
                               MatrixXcd z_r, double z0)
    : z_t_(std::move(z_t)), z_i_(std::move(z_i)), z_r_(std::move(z_r)),
      z0_(z0) {
  if (!(z0_ > 0.0)) {
    throw ConfigError("TerminationSet: z0 must be positive");
  }
  auto check_diagonal = [](const MatrixXcd& m, const char* name) {
    if (m.rows() != m.cols()) {
      throw ConfigError(std::string(name) + " must be square");
    }
    MatrixXcd off = m;
    off.diagonal().setZero();
    if (off.norm() != 0.0) {
      throw ConfigError(std::string(name) + " must be diagonal");
    }
  };
  check_diagonal(z_t_, "TerminationSet: z_t");
  check_diagonal(z_r_, "TerminationSet: z_r");
}

TerminationSet TerminationSet::matched(const PortPartition& p, double z0) {
  return TerminationSet(
      z0 * MatrixXcd::Identity(p.n_t, p.n_t),
      RisTermination::impedance(z0 * MatrixXcd::Identity(p.n_i, p.n_i)),
      z0 * MatrixXcd::Identity(p.n_r, p.n_r), z0);
}

MatrixXcd TerminationSet::y_t() const {
  return guarded_inverse(z_t_, "TerminationSet::y_t");
}

MatrixXcd TerminationSet::y_r() const {
  return guarded_inverse(z_r_, "TerminationSet::y_r");
}

MatrixXcd TerminationSet::gamma_t() const { return reflection_of(z_t_, z0_); }

MatrixXcd TerminationSet::gamma_r() const { return reflection_of(z_r_, z0_); }

VectorXcd SourceExcitation::i_s(const TerminationSet& terms) const {
  return source_equivalents(v_s, terms.z_t(), terms.z0()).i_s;
}

VectorXcd SourceExcitation::b_s(const TerminationSet& terms) const {
  return source_equivalents(v_s, terms.z_t(), terms.z0()).b_s;
}

double rcond(const MatrixXcd& m) {
  if (m.rows() == 0) {
    return 1.0;
  }
  Eigen::JacobiSVD<MatrixXcd> svd(m);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(svd.singularValues().size() - 1);
  if (smax == 0.0) {
    return 0.0;
  }
  return smin / smax;
}

MatrixXcd guarded_inverse(const MatrixXcd& m, const char* context) {
  if (rcond(m) < kRcondThreshold) {
    throw SingularConversion(std::string(context) +
                             ": matrix is numerically singular");
  }
  return m.inverse();
}

MatrixXcd guarded_solve(const MatrixXcd& m, const MatrixXcd& rhs,
                        const char* context) {
  if (rcond(m) < kRcondThreshold) {
    throw SingularSystem(std::string(context) +
                         ": matrix is numerically singular");
  }
  return m.partialPivLu().solve(rhs);
}

NetworkMatrix z_to_s(const NetworkMatrix& z) {
  if (z.kind() != NetworkKind::Z) {
    throw KindMismatch("z_to_s: expected Z-parameters");
  }
  const int n = z.partition().total();
  const MatrixXcd eye = MatrixXcd::Identity(n, n);
  const MatrixXcd shifted = z.values() + z.z0() * eye;
  if (rcond(shifted) < kRcondThreshold) {
    throw SingularConversion("z_to_s: Z + Z0*I is numerically singular");
  }
  MatrixXcd s = shifted.partialPivLu().solve(z.values() - z.z0() * eye);
  return NetworkMatrix(NetworkKind::S, std::move(s), z.partition(), z.z0());
}

NetworkMatrix s_to_z(const NetworkMatrix& s) {
  if (s.kind() != NetworkKind::S) {
    throw KindMismatch("s_to_z: expected S-parameters");
  }
  const int n = s.partition().total();
  const MatrixXcd eye = MatrixXcd::Identity(n, n);
  const MatrixXcd shifted = eye - s.values();
  if (rcond(shifted) < kRcondThreshold) {
    throw SingularConversion("s_to_z: I - S is numerically singular");
  }
  MatrixXcd z =
      2.0 * s.z0() * shifted.partialPivLu().solve(eye) - s.z0() * eye;
  return NetworkMatrix(NetworkKind::Z, std::move(z), s.partition(), s.z0());
}

NetworkMatrix z_to_y(const NetworkMatrix& z) {
  if (z.kind() != NetworkKind::Z) {
    throw KindMismatch("z_to_y: expected Z-parameters");
  }
  MatrixXcd y = guarded_inverse(z.values(), "z_to_y");
  return NetworkMatrix(NetworkKind::Y, std::move(y), z.partition(), z.z0());
}

NetworkMatrix y_to_z(const NetworkMatrix& y) {
  if (y.kind() != NetworkKind::Y) {
    throw KindMismatch("y_to_z: expected Y-parameters");
  }
  MatrixXcd z = guarded_inverse(y.values(), "y_to_z");
  return NetworkMatrix(NetworkKind::Z, std::move(z), y.partition(), y.z0());
}

MatrixXcd reflection_of(const MatrixXcd& zterm, double z0) {
  const int n = static_cast<int>(zterm.rows());
  const MatrixXcd eye = MatrixXcd::Identity(n, n);
  const MatrixXcd shifted = zterm + z0 * eye;
  if (rcond(shifted) < kRcondThreshold) {
    throw SingularConversion(
        "reflection_of: Z + Z0*I is numerically singular");
  }
  return shifted.partialPivLu().solve(zterm - z0 * eye);
}

SourceEquivalents source_equivalents(const VectorXcd& v_s,
                                     const MatrixXcd& z_t, double z0) {
  const int n = static_cast<int>(v_s.size());
  SourceEquivalents out;
  out.i_s = guarded_inverse(z_t, "source_equivalents") * v_s;
  out.b_s = 0.5 * (MatrixXcd::Identity(n, n) - reflection_of(z_t, z0)) * v_s;
  return out;
}

NetworkMatrix random_passive_network(const PortPartition& partition,
                                     std::uint64_t seed, double z0) {
  partition.check();
  const int n = partition.total();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  // Z = jX + R with X random real symmetric and R = M M^H + eps I, so the
  // Hermitian part of Z is positive definite.
  MatrixXd x(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double v = z0 * gauss(rng);
      x(i, j) = v;
      x(j, i) = v;
    }
  }
  MatrixXcd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      m(i, j) = Complex(gauss(rng), gauss(rng)) * (z0 / 2.0);
    }
  }
  MatrixXcd z = Complex(0.0, 1.0) * x.cast<Complex>() + m * m.adjoint() +
                1e-3 * z0 * MatrixXcd::Identity(n, n);
  return NetworkMatrix(NetworkKind::Z, std::move(z), partition, z0);
}

}  // namespace rismp
