#ifndef RISMP_OPTIMIZE_HPP
#define RISMP_OPTIMIZE_HPP

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "rismp/architectures.hpp"
#include "rismp/channel.hpp"
#include "rismp/types.hpp"

namespace rismp {

/// One received-signal-power maximization instance. The blocks live in
/// the kind's matched form; z_ii carries the RIS array coupling for the
/// Z formulation (absent means a perfectly matched RIS array).
struct MIMOScenario {
  MatchedBlocks blocks;
  std::optional<MatrixXcd> z_ii;
  double p_t = 1.0;
  double z0 = kDefaultZ0;

  int n_t() const { return int(blocks.rt.cols()); }
  int n_r() const { return int(blocks.rt.rows()); }
  int n_i() const { return int(blocks.ri.cols()); }
  void check() const;
};

struct SolveOptions {
  int max_outer = 100;
  double tol = 1e-8;
  std::uint64_t seed = 0;
  int inner_budget = 200;
  int restarts = 1;
  std::optional<RisConfiguration> init;
};

struct BeamformingSolution {
  VectorXcd w;
  RowVectorXcd g;
  RisConfiguration ris;
  std::vector<double> trace;  // received power per outer iteration, W
  bool converged = false;

  double power() const { return trace.empty() ? 0.0 : trace.back(); }
  int iterations() const { return int(trace.size()); }
};

/// Dominant singular pair of the effective channel; w normalized so its
/// first significant entry is real positive, g chosen so g H w is real
/// positive. A zero matrix yields the canonical basis pair.
std::pair<VectorXcd, RowVectorXcd> update_beamformers(const MatrixXcd& h);

/// Channel for the scenario's formulation at a given RIS state.
MatrixXcd scenario_channel(const MIMOScenario& scn,
                           const RisConfiguration& ris);

/// Takagi factorization of a complex symmetric matrix: k = U S U^T with
/// U unitary and S the singular values. Solved through the eigenproblem
/// of the real symmetric embedding [[Re k, Im k], [Im k, -Re k]], which
/// stays well defined for repeated and zero singular values.
MatrixXcd takagi_symmetric(const MatrixXcd& k, VectorXd* singular = nullptr);

/// S-parameter formulation (single/group/fully): alternating SVD
/// beamformers and a closed-form symmetric-unitary inner step that
/// attains |s_RT^eff| + sum_g ||s_RI,g^eff|| ||s_IT,g^eff||.
BeamformingSolution optimize_s_group(const MIMOScenario& scn,
                                     const ArchitectureSpec& spec,
                                     const SolveOptions& opts);

/// Y-parameter formulation (tree/forest): per-block tridiagonal B_I from
/// the alignment linear system, polished by cyclic coordinate ascent.
BeamformingSolution optimize_y_forest(const MIMOScenario& scn,
                                      const ArchitectureSpec& spec,
                                      const SolveOptions& opts);

/// Z-parameter formulation with RIS mutual coupling (single/group/fully):
/// projected gradient ascent on the free reactances with a mapped
/// S-solution candidate each outer iteration.
BeamformingSolution optimize_z_group_mc(const MIMOScenario& scn,
                                        const ArchitectureSpec& spec,
                                        const SolveOptions& opts);

}  // namespace rismp

#endif  // RISMP_OPTIMIZE_HPP
