#ifndef RISMP_CHANNEL_HPP
#define RISMP_CHANNEL_HPP

#include "rismp/framework.hpp"
#include "rismp/netparams.hpp"

namespace rismp {

enum class ChannelFidelity {
  general,
  unilateral,
  matched_with_ris_coupling,
  matched,
  widely_used,
  widely_used_neumann,
};

/// End-to-end voltage-gain channel: v_R = H v_T.
struct ChannelMatrix {
  MatrixXcd h;
  ChannelFidelity fidelity;
};

/// Off-diagonal and array blocks of a unilateral Z-parameter description.
struct ZBlocks {
  MatrixXcd z_tt;
  MatrixXcd z_ii;
  MatrixXcd z_rr;
  MatrixXcd z_rt;
  MatrixXcd z_ri;
  MatrixXcd z_it;
};

/// The blocks a matched (perfectly matched transmitter/receiver) channel
/// model needs, in any one parameter kind.
struct MatchedBlocks {
  NetworkKind kind;
  MatrixXcd rt;
  MatrixXcd ri;
  MatrixXcd it;
};

struct UnilateralMappings {
  MatrixXcd y_ri;
  MatrixXcd y_it;
  MatrixXcd y_rt;
  MatrixXcd s_ri;
  MatrixXcd s_it;
  MatrixXcd s_rt;
};

/// Exact channel, no approximations; the three kinds are equivalent.
ChannelMatrix general_channel(NetworkKind kind, const NetworkMatrix& net,
                              const TerminationSet& terms);

/// Closed-form cascade valid when the TI, TR, and IR blocks vanish.
ChannelMatrix unilateral_channel(NetworkKind kind, const NetworkMatrix& net,
                                 const TerminationSet& terms);

/// Channel with perfectly matched transmitter/receiver arrays and
/// terminations. With ris_coupling present the RIS array block is kept;
/// without it the RIS array is perfectly matched too.
///
/// For the S kind ris_coupling is the S_II block, for Z/Y the Z_II/Y_II
/// block. The RIS state enters as Z_I, Y_I, or Theta per the kind.
ChannelMatrix matched_channel(const MatchedBlocks& blocks,
                              const RisTermination& ris, double z0,
                              const std::optional<MatrixXcd>& ris_coupling =
                                  std::nullopt);

/// The six unilateral Y/S block formulas in terms of Z blocks.
UnilateralMappings map_unilateral(const ZBlocks& z, double z0);

/// Fully matched specialization (Z_TT = Z_II = Z_RR = Z0 I).
UnilateralMappings map_matched(const MatrixXcd& z_rt, const MatrixXcd& z_ri,
                               const MatrixXcd& z_it, double z0);

/// First-order Neumann approximation S_RT ~ Z_RT / (2 Z0).
MatrixXcd neumann_srt(const MatrixXcd& z_rt, double z0);

/// H = H_RT + H_RI Theta H_IT.
ChannelMatrix widely_used_channel(const MatrixXcd& h_rt,
                                  const MatrixXcd& h_ri,
                                  const MatrixXcd& h_it,
                                  const MatrixXcd& theta);

}  // namespace rismp

#endif  // RISMP_CHANNEL_HPP
