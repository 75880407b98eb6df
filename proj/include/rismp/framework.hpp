#ifndef RISMP_FRAMEWORK_HPP
#define RISMP_FRAMEWORK_HPP

#include <optional>

#include "rismp/types.hpp"

namespace rismp {

/// One diagonal block of the termination matrix. The open sentinel models
/// an infinite termination: the corresponding block of y is forced to zero
/// and the block inverse tends to zero.
class TerminationBlock {
 public:
  static TerminationBlock matrix(MatrixXcd a);
  static TerminationBlock open(int n);

  bool is_open() const { return open_; }
  int size() const { return n_; }
  const MatrixXcd& value() const;
  /// a^-1, which is exactly zero for the open sentinel.
  MatrixXcd inverse(const char* context) const;

 private:
  TerminationBlock(bool open, int n, MatrixXcd a);

  bool open_;
  int n_;
  MatrixXcd a_;
};

/// The coupled system
///   y = A x,  x1 = c1 + A1 y1,  x2 = A2 y2,  x3 = A3 y3,
/// with x and y partitioned into three blocks of sizes (n1, n2, n3).
struct TerminationProblem {
  MatrixXcd a;
  VectorXcd c1;
  TerminationBlock a1;
  TerminationBlock a2;
  TerminationBlock a3;

  int n1() const { return a1.size(); }
  int n2() const { return a2.size(); }
  int n3() const { return a3.size(); }
  int total() const { return n1() + n2() + n3(); }

  void check() const;

  MatrixXcd block(int row, int col) const;
};

struct FrameworkSolution {
  VectorXcd x1;
  VectorXcd x2;
  VectorXcd x3;
  VectorXcd y;

  VectorXcd x() const;
};

/// Direct dense solve of x = (I - Abar A)^-1 c. Open termination blocks
/// are handled by constraining the matching block of y to zero.
FrameworkSolution solve_general(const TerminationProblem& p);

/// Closed-form cascade for block-lower-triangular A. Agrees with
/// solve_general on its domain.
FrameworkSolution solve_unilateral(const TerminationProblem& p);

}  // namespace rismp

#endif  // RISMP_FRAMEWORK_HPP
