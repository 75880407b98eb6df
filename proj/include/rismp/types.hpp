#ifndef RISMP_TYPES_HPP
#define RISMP_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace rismp {

using Complex = std::complex<double>;
using MatrixXcd = Eigen::MatrixXcd;
using MatrixXd = Eigen::MatrixXd;
using VectorXcd = Eigen::VectorXcd;
using VectorXd = Eigen::VectorXd;
using RowVectorXcd = Eigen::RowVectorXcd;

inline constexpr double kDefaultZ0 = 50.0;

// Conversions and solves reject matrices whose reciprocal condition
// number falls below this threshold.
inline constexpr double kRcondThreshold = 1e-12;

class SingularConversion : public std::runtime_error {
 public:
  explicit SingularConversion(const std::string& what)
      : std::runtime_error(what) {}
};

class SingularSystem : public std::runtime_error {
 public:
  explicit SingularSystem(const std::string& what)
      : std::runtime_error(what) {}
};

class NotBlockLowerTriangular : public std::runtime_error {
 public:
  explicit NotBlockLowerTriangular(const std::string& what)
      : std::runtime_error(what) {}
};

class NotUnilateral : public std::runtime_error {
 public:
  explicit NotUnilateral(const std::string& what)
      : std::runtime_error(what) {}
};

class KindMismatch : public std::runtime_error {
 public:
  explicit KindMismatch(const std::string& what)
      : std::runtime_error(what) {}
};

class NotSymmetric : public std::runtime_error {
 public:
  explicit NotSymmetric(const std::string& what)
      : std::runtime_error(what) {}
};

class InvalidGeometry : public std::runtime_error {
 public:
  explicit InvalidGeometry(const std::string& what)
      : std::runtime_error(what) {}
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what)
      : std::runtime_error(what) {}
};

/// Port counts of the three-terminal network: transmitter, RIS, receiver.
struct PortPartition {
  int n_t = 1;
  int n_i = 1;
  int n_r = 1;

  int total() const { return n_t + n_i + n_r; }

  void check() const {
    if (n_t < 1 || n_i < 1 || n_r < 1) {
      throw ConfigError("PortPartition: all port counts must be >= 1");
    }
  }

  bool operator==(const PortPartition&) const = default;
};

}  // namespace rismp

#endif  // RISMP_TYPES_HPP
