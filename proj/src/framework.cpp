#include "rismp/framework.hpp"

#include "rismp/netparams.hpp"

namespace rismp {

TerminationBlock::TerminationBlock(bool open, int n, MatrixXcd a)
    : open_(open), n_(n), a_(std::move(a)) {}

TerminationBlock TerminationBlock::matrix(MatrixXcd a) {
  if (a.rows() != a.cols()) {
    throw ConfigError("TerminationBlock: matrix must be square");
  }
  const int n = static_cast<int>(a.rows());
  return TerminationBlock(false, n, std::move(a));
}

TerminationBlock TerminationBlock::open(int n) {
  return TerminationBlock(true, n, MatrixXcd());
}

const MatrixXcd& TerminationBlock::value() const {
  if (open_) {
    throw SingularSystem("TerminationBlock: open sentinel has no value");
  }
  return a_;
}

MatrixXcd TerminationBlock::inverse(const char* context) const {
  if (open_) {
    return MatrixXcd::Zero(n_, n_);
  }
  if (rcond(a_) < kRcondThreshold) {
    throw SingularSystem(std::string(context) +
                         ": termination block is numerically singular");
  }
  return a_.inverse();
}

void TerminationProblem::check() const {
  if (a1.is_open()) {
    throw ConfigError(
        "TerminationProblem: the source block a1 cannot be open");
  }
  const int n = total();
  if (a.rows() != n || a.cols() != n) {
    throw ConfigError("TerminationProblem: A side does not match blocks");
  }
  if (c1.size() != n1()) {
    throw ConfigError("TerminationProblem: c1 size does not match a1");
  }
}

MatrixXcd TerminationProblem::block(int row, int col) const {
  const int sizes[3] = {n1(), n2(), n3()};
  const int offs[3] = {0, n1(), n1() + n2()};
  return a.block(offs[row], offs[col], sizes[row], sizes[col]);
}

VectorXcd FrameworkSolution::x() const {
  VectorXcd out(x1.size() + x2.size() + x3.size());
  out << x1, x2, x3;
  return out;
}

namespace {

FrameworkSolution split_solution(const TerminationProblem& p,
                                 const VectorXcd& x) {
  FrameworkSolution sol;
  sol.x1 = x.segment(0, p.n1());
  sol.x2 = x.segment(p.n1(), p.n2());
  sol.x3 = x.segment(p.n1() + p.n2(), p.n3());
  sol.y = p.a * x;
  return sol;
}

}  // namespace

FrameworkSolution solve_general(const TerminationProblem& p) {
  p.check();
  const int n = p.total();
  const int offs[3] = {0, p.n1(), p.n1() + p.n2()};
  const int sizes[3] = {p.n1(), p.n2(), p.n3()};
  const TerminationBlock* blocks[3] = {&p.a1, &p.a2, &p.a3};

  // Block rows: x_i - A_i (A x)_i = c_i for finite terminations,
  // (A x)_i = 0 for open ones (the open limit forces y_i = 0).
  MatrixXcd m = MatrixXcd::Zero(n, n);
  VectorXcd c = VectorXcd::Zero(n);
  for (int i = 0; i < 3; ++i) {
    auto rows_of_a = p.a.middleRows(offs[i], sizes[i]);
    if (blocks[i]->is_open()) {
      m.middleRows(offs[i], sizes[i]) = rows_of_a;
    } else {
      m.middleRows(offs[i], sizes[i]) = -blocks[i]->value() * rows_of_a;
      m.block(offs[i], offs[i], sizes[i], sizes[i]) +=
          MatrixXcd::Identity(sizes[i], sizes[i]);
    }
  }
  c.segment(0, p.n1()) = p.c1;

  if (rcond(m) < kRcondThreshold) {
    throw SingularSystem(
        "solve_general: I - Abar*A is numerically singular");
  }
  return split_solution(p, m.partialPivLu().solve(c));
}

FrameworkSolution solve_unilateral(const TerminationProblem& p) {
  p.check();
  const double scale = std::max(1.0, p.a.norm());
  const double upper = std::max({p.block(0, 1).norm(), p.block(0, 2).norm(),
                                 p.block(1, 2).norm()});
  if (upper > 1e-14 * scale) {
    throw NotBlockLowerTriangular(
        "solve_unilateral: A has nonzero upper off-diagonal blocks");
  }

  const MatrixXcd a11 = p.block(0, 0);
  const MatrixXcd a21 = p.block(1, 0);
  const MatrixXcd a22 = p.block(1, 1);
  const MatrixXcd a31 = p.block(2, 0);
  const MatrixXcd a32 = p.block(2, 1);
  const MatrixXcd a33 = p.block(2, 2);

  const MatrixXcd eye1 = MatrixXcd::Identity(p.n1(), p.n1());
  const MatrixXcd top = eye1 - p.a1.value() * a11;
  FrameworkSolution sol;
  sol.x1 = guarded_solve(top, p.c1, "solve_unilateral: I - A1*A11");

  // (A2^-1 - A22)^-1 A21 x1; the open sentinel contributes A2^-1 = 0.
  const MatrixXcd mid = p.a2.inverse("solve_unilateral: A2") - a22;
  const VectorXcd mid_term =
      guarded_solve(mid, MatrixXcd(a21 * sol.x1),
                    "solve_unilateral: A2^-1 - A22");
  sol.x2 = mid_term;

  const MatrixXcd bot = p.a3.inverse("solve_unilateral: A3") - a33;
  sol.x3 = guarded_solve(bot, MatrixXcd(a31 * sol.x1 + a32 * mid_term),
                         "solve_unilateral: A3^-1 - A33");
  sol.y = p.a * sol.x();
  return sol;
}

}  // namespace rismp
