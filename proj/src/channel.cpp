#include "rismp/channel.hpp"

namespace rismp {

namespace {

struct TildeBlocks {
  MatrixXcd tt;  // x1 (or y1) response to unit sources
  MatrixXcd rt;  // x3 (or y3) response to unit sources
};

// Solves the termination problem once per transmitter port and collects
// the T and R blocks of the resolvent. For the S kind the wave-domain
// resolvent S(I - Gamma S)^-1 lives in y, not x.
TildeBlocks resolvent_blocks(const TerminationProblem& p, bool from_y) {
  TildeBlocks out;
  out.tt.resize(p.n1(), p.n1());
  out.rt.resize(p.n3(), p.n1());
  TerminationProblem q = p;
  for (int k = 0; k < p.n1(); ++k) {
    q.c1 = VectorXcd::Zero(p.n1());
    q.c1(k) = 1.0;
    const FrameworkSolution sol = solve_general(q);
    if (from_y) {
      out.tt.col(k) = sol.y.segment(0, p.n1());
      out.rt.col(k) = sol.y.segment(p.n1() + p.n2(), p.n3());
    } else {
      out.tt.col(k) = sol.x1;
      out.rt.col(k) = sol.x3;
    }
  }
  return out;
}

TerminationBlock negated(const MatrixXcd& m) {
  return TerminationBlock::matrix(-m);
}

MatrixXcd identity_like(const MatrixXcd& m) {
  return MatrixXcd::Identity(m.rows(), m.cols());
}

}  // namespace

ChannelMatrix general_channel(NetworkKind kind, const NetworkMatrix& net,
                              const TerminationSet& terms) {
  if (net.kind() != kind) {
    throw KindMismatch("general_channel: network kind does not match");
  }
  const PortPartition& part = net.partition();
  TerminationProblem p{
      MatrixXcd(), VectorXcd::Zero(part.n_t),
      TerminationBlock::matrix(MatrixXcd::Zero(part.n_t, part.n_t)),
      TerminationBlock::open(part.n_i),
      TerminationBlock::matrix(MatrixXcd::Zero(part.n_r, part.n_r))};

  switch (kind) {
    case NetworkKind::Z: {
      p.a = guarded_inverse(net.values(), "general_channel: Z");
      p.a1 = negated(terms.z_t());
      p.a2 = terms.z_i().is_open()
                 ? TerminationBlock::open(part.n_i)
                 : negated(terms.z_i().z());
      p.a3 = negated(terms.z_r());
      const TildeBlocks t = resolvent_blocks(p, /*from_y=*/false);
      MatrixXcd h =
          t.rt * guarded_inverse(t.tt, "general_channel: Ztilde_TT");
      return {std::move(h), ChannelFidelity::general};
    }
    case NetworkKind::Y: {
      p.a = guarded_inverse(net.values(), "general_channel: Y");
      p.a1 = negated(terms.y_t());
      p.a2 = negated(terms.y_i());
      p.a3 = negated(terms.y_r());
      const TildeBlocks t = resolvent_blocks(p, /*from_y=*/false);
      const MatrixXcd eye = MatrixXcd::Identity(part.n_t, part.n_t);
      MatrixXcd h =
          guarded_solve(terms.y_r(), t.rt, "general_channel: Y_R") *
          guarded_solve(MatrixXcd(t.tt - eye), terms.y_t(),
                        "general_channel: Ytilde_TT - I");
      return {std::move(h), ChannelFidelity::general};
    }
    case NetworkKind::S: {
      p.a = net.values();
      p.a1 = TerminationBlock::matrix(terms.gamma_t());
      p.a2 = TerminationBlock::matrix(terms.theta());
      p.a3 = TerminationBlock::matrix(terms.gamma_r());
      const TildeBlocks t = resolvent_blocks(p, /*from_y=*/true);
      const MatrixXcd eye_t = MatrixXcd::Identity(part.n_t, part.n_t);
      const MatrixXcd eye_r = MatrixXcd::Identity(part.n_r, part.n_r);
      const MatrixXcd denom = eye_t + terms.gamma_t() * t.tt + t.tt;
      if (rcond(denom) < kRcondThreshold) {
        throw SingularSystem(
            "general_channel: I + Gamma_T*Stilde_TT + Stilde_TT singular");
      }
      MatrixXcd h = (terms.gamma_r() + eye_r) * t.rt *
                    denom.partialPivLu().solve(eye_t);
      return {std::move(h), ChannelFidelity::general};
    }
  }
  throw KindMismatch("general_channel: unknown kind");
}

ChannelMatrix unilateral_channel(NetworkKind kind, const NetworkMatrix& net,
                                 const TerminationSet& terms) {
  if (net.kind() != kind) {
    throw KindMismatch("unilateral_channel: network kind does not match");
  }
  const double scale = std::max(1.0, net.values().norm());
  const double upper =
      std::max({net.ti().norm(), net.tr().norm(), net.ir().norm()});
  if (upper > 1e-14 * scale) {
    throw NotUnilateral(
        "unilateral_channel: TI, TR, IR blocks are not zero");
  }

  switch (kind) {
    case NetworkKind::Z: {
      const MatrixXcd z_rr = net.rr();
      MatrixXcd core = net.rt();
      if (!terms.z_i().is_open()) {
        core -= net.ri() *
                guarded_solve(MatrixXcd(terms.z_i().z() + net.ii()),
                              net.it(), "unilateral_channel: Z_I + Z_II");
      }
      MatrixXcd h =
          terms.z_r() *
          guarded_solve(MatrixXcd(terms.z_r() + z_rr), core,
                        "unilateral_channel: Z_R + Z_RR") *
          guarded_inverse(net.tt(), "unilateral_channel: Z_TT");
      return {std::move(h), ChannelFidelity::unilateral};
    }
    case NetworkKind::Y: {
      MatrixXcd core =
          -net.rt() +
          net.ri() * guarded_solve(MatrixXcd(terms.y_i() + net.ii()),
                                   net.it(),
                                   "unilateral_channel: Y_I + Y_II");
      MatrixXcd h = guarded_solve(MatrixXcd(terms.y_r() + net.rr()), core,
                                  "unilateral_channel: Y_R + Y_RR");
      return {std::move(h), ChannelFidelity::unilateral};
    }
    case NetworkKind::S: {
      const MatrixXcd theta = terms.theta();
      const MatrixXcd s_ii = net.ii();
      MatrixXcd core =
          net.rt() +
          net.ri() *
              guarded_solve(MatrixXcd(identity_like(s_ii) - theta * s_ii),
                            MatrixXcd(theta * net.it()),
                            "unilateral_channel: I - Theta*S_II");
      const MatrixXcd gamma_r = terms.gamma_r();
      const MatrixXcd s_rr = net.rr();
      MatrixXcd h =
          (gamma_r + identity_like(gamma_r)) *
          guarded_solve(MatrixXcd(identity_like(s_rr) - s_rr * gamma_r),
                        core, "unilateral_channel: I - S_RR*Gamma_R");
      const MatrixXcd s_tt = net.tt();
      h = h * guarded_inverse(MatrixXcd(identity_like(s_tt) + s_tt),
                              "unilateral_channel: I + S_TT");
      return {std::move(h), ChannelFidelity::unilateral};
    }
  }
  throw KindMismatch("unilateral_channel: unknown kind");
}

ChannelMatrix matched_channel(const MatchedBlocks& blocks,
                              const RisTermination& ris, double z0,
                              const std::optional<MatrixXcd>& ris_coupling) {
  const double y0 = 1.0 / z0;
  const int n_i = ris.size();
  const MatrixXcd eye = MatrixXcd::Identity(n_i, n_i);
  const ChannelFidelity fidelity =
      ris_coupling ? ChannelFidelity::matched_with_ris_coupling
                   : ChannelFidelity::matched;

  switch (blocks.kind) {
    case NetworkKind::Z: {
      const MatrixXcd z_ii = ris_coupling ? *ris_coupling : z0 * eye;
      MatrixXcd h = blocks.rt;
      if (!ris.is_open()) {
        h -= blocks.ri * guarded_solve(MatrixXcd(ris.z() + z_ii),
                                       blocks.it,
                                       "matched_channel: Z_I + Z_II");
      }
      return {MatrixXcd(h / (2.0 * z0)), fidelity};
    }
    case NetworkKind::Y: {
      const MatrixXcd y_ii = ris_coupling ? *ris_coupling : y0 * eye;
      MatrixXcd h =
          -blocks.rt +
          blocks.ri * guarded_solve(MatrixXcd(ris.y() + y_ii), blocks.it,
                                    "matched_channel: Y_I + Y_II");
      return {MatrixXcd(h / (2.0 * y0)), fidelity};
    }
    case NetworkKind::S: {
      const MatrixXcd theta = ris.theta(z0);
      MatrixXcd h = blocks.rt;
      if (ris_coupling) {
        h += blocks.ri *
             guarded_solve(MatrixXcd(eye - theta * (*ris_coupling)),
                           MatrixXcd(theta * blocks.it),
                           "matched_channel: I - Theta*S_II") ;
      } else {
        h += blocks.ri * theta * blocks.it;
      }
      return {std::move(h), fidelity};
    }
  }
  throw KindMismatch("matched_channel: unknown kind");
}

UnilateralMappings map_unilateral(const ZBlocks& z, double z0) {
  const MatrixXcd z_tt_inv = guarded_inverse(z.z_tt, "map_unilateral: Z_TT");
  const MatrixXcd z_ii_inv = guarded_inverse(z.z_ii, "map_unilateral: Z_II");
  const MatrixXcd z_rr_inv = guarded_inverse(z.z_rr, "map_unilateral: Z_RR");
  const MatrixXcd sh_tt = guarded_inverse(
      MatrixXcd(z.z_tt + z0 * identity_like(z.z_tt)),
      "map_unilateral: Z_TT + Z0*I");
  const MatrixXcd sh_ii = guarded_inverse(
      MatrixXcd(z.z_ii + z0 * identity_like(z.z_ii)),
      "map_unilateral: Z_II + Z0*I");
  const MatrixXcd sh_rr = guarded_inverse(
      MatrixXcd(z.z_rr + z0 * identity_like(z.z_rr)),
      "map_unilateral: Z_RR + Z0*I");

  UnilateralMappings out;
  out.y_ri = -z_rr_inv * z.z_ri * z_ii_inv;
  out.y_it = -z_ii_inv * z.z_it * z_tt_inv;
  out.y_rt = z_rr_inv * (-z.z_rt + z.z_ri * z_ii_inv * z.z_it) * z_tt_inv;
  out.s_ri = 2.0 * z0 * sh_rr * z.z_ri * sh_ii;
  out.s_it = 2.0 * z0 * sh_ii * z.z_it * sh_tt;
  out.s_rt =
      2.0 * z0 * sh_rr * (z.z_rt - z.z_ri * sh_ii * z.z_it) * sh_tt;
  return out;
}

UnilateralMappings map_matched(const MatrixXcd& z_rt, const MatrixXcd& z_ri,
                               const MatrixXcd& z_it, double z0) {
  UnilateralMappings out;
  out.y_ri = -z_ri / (z0 * z0);
  out.y_it = -z_it / (z0 * z0);
  out.y_rt = (-z_rt + z_ri * z_it / z0) / (z0 * z0);
  out.s_ri = z_ri / (2.0 * z0);
  out.s_it = z_it / (2.0 * z0);
  out.s_rt = (z_rt - z_ri * z_it / (2.0 * z0)) / (2.0 * z0);
  return out;
}

MatrixXcd neumann_srt(const MatrixXcd& z_rt, double z0) {
  return z_rt / (2.0 * z0);
}

ChannelMatrix widely_used_channel(const MatrixXcd& h_rt,
                                  const MatrixXcd& h_ri,
                                  const MatrixXcd& h_it,
                                  const MatrixXcd& theta) {
  return {MatrixXcd(h_rt + h_ri * theta * h_it),
          ChannelFidelity::widely_used};
}

}  // namespace rismp
