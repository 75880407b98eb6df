#include "rismp/optimize.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace rismp {

namespace {

constexpr Complex kJ{0.0, 1.0};

struct Effective {
  Complex rt;
  RowVectorXcd ri;
  VectorXcd it;
};

Effective effective_scalars(const MatchedBlocks& blocks, const VectorXcd& w,
                            const RowVectorXcd& g) {
  return {(g * blocks.rt * w).value(), g * blocks.ri, blocks.it * w};
}

struct AlignedTheta {
  MatrixXcd theta;
  double bound;
};

// Per-group symmetric-unitary state aligning every RIS contribution with
// the direct term. Each block attains ||r_g|| ||t_g|| with phase psi, so
// the total reaches |c| + sum_g ||r_g|| ||t_g||.
AlignedTheta aligned_theta(const ArchitectureSpec& spec, Complex c,
                           const RowVectorXcd& r, const VectorXcd& t) {
  const int n = spec.n_i;
  const int b = spec.block_size();
  const double psi = std::abs(c) > 0.0 ? std::arg(c) : 0.0;

  AlignedTheta out;
  out.theta = MatrixXcd::Zero(n, n);
  out.bound = std::abs(c);
  for (int g = 0; g < spec.groups(); ++g) {
    const RowVectorXcd rg = r.segment(g * b, b);
    const VectorXcd tg = t.segment(g * b, b);
    const double weight = rg.norm() * tg.norm();
    out.bound += weight;
    if (weight == 0.0) {
      out.theta.block(g * b, g * b, b, b) = MatrixXcd::Identity(b, b);
      continue;
    }
    if (b == 1) {
      out.theta(g, g) =
          std::exp(kJ * (psi - std::arg(rg(0) * tg(0))));
      continue;
    }
    const MatrixXcd m = std::exp(-kJ * psi) * tg * rg;
    const MatrixXcd k = 0.5 * (m + m.transpose());
    const MatrixXcd u = takagi_symmetric(k);
    out.theta.block(g * b, g * b, b, b) =
        (u * u.transpose()).conjugate();
  }
  return out;
}

// Tridiagonal real symmetric B with B(x + t) = -j y0 (x - t) in the
// least-squares sense. For unit x and t one real equation is redundant
// (x'^H B x' is real for real symmetric B), so the 2b - 1 free entries
// generically solve the system exactly.
MatrixXd tridiagonal_alignment(const VectorXcd& x, const VectorXcd& t,
                               double y0) {
  const int b = int(x.size());
  const VectorXcd v = x + t;
  const VectorXcd rhs = -kJ * y0 * (x - t);
  const int unknowns = 2 * b - 1;  // b diagonal + (b - 1) off-diagonal

  MatrixXd a = MatrixXd::Zero(2 * b, unknowns);
  VectorXd y(2 * b);
  for (int i = 0; i < b; ++i) {
    auto put = [&](int p, Complex coef) {
      a(i, p) = coef.real();
      a(b + i, p) = coef.imag();
    };
    put(i, v(i));  // diagonal b_ii
    if (i > 0) put(b + i - 1, v(i - 1));
    if (i + 1 < b) put(b + i, v(i + 1));
    y(i) = rhs(i).real();
    y(b + i) = rhs(i).imag();
  }

  const VectorXd p = a.colPivHouseholderQr().solve(y);
  MatrixXd out = MatrixXd::Zero(b, b);
  for (int i = 0; i < b; ++i) {
    out(i, i) = p(i);
    if (i + 1 < b) {
      out(i, i + 1) = out(i + 1, i) = p(b + i);
    }
  }
  return out;
}

double safe_rcond(const MatrixXcd& m) { return rcond(m); }

// Per-block Cayley map Theta -> X with Z_I = jX = Z0 (I+Theta)(I-Theta)^-1.
MatrixXd reactance_from_theta_blocks(const MatrixXcd& theta,
                                     const ArchitectureSpec& spec,
                                     double z0) {
  const int b = spec.block_size();
  MatrixXd x = MatrixXd::Zero(spec.n_i, spec.n_i);
  for (int grp = 0; grp < spec.groups(); ++grp) {
    const MatrixXcd tg = theta.block(grp * b, grp * b, b, b);
    const MatrixXcd eye = MatrixXcd::Identity(b, b);
    if (safe_rcond(MatrixXcd(eye - tg)) < kRcondThreshold) {
      throw SingularConversion(
          "reactance_from_theta_blocks: I - Theta singular");
    }
    const MatrixXcd zg =
        z0 * (eye - tg).partialPivLu().solve(MatrixXcd(eye + tg));
    const MatrixXd xg = (-kJ * zg).real().eval();
    x.block(grp * b, grp * b, b, b) = 0.5 * (xg + xg.transpose());
  }
  return x;
}

// |c - r (jX + Z_II)^-1 t|^2, or a rejection marker when the shifted
// matrix is numerically singular.
double z_objective(const MatrixXcd& x, const MatrixXcd& z_ii, Complex c,
                   const RowVectorXcd& r, const VectorXcd& t) {
  const MatrixXcd shifted = kJ * x + z_ii;
  if (safe_rcond(shifted) < kRcondThreshold) {
    return -1.0;
  }
  const Complex h = c - (r * shifted.partialPivLu().solve(t)).value();
  return std::norm(h);
}

double y_objective(const MatrixXd& b_i, double y0, Complex y_rt,
                   const RowVectorXcd& r, const VectorXcd& t) {
  const int n = int(b_i.rows());
  // jB + Y0 I is never singular for real symmetric B: its eigenvalues
  // are j lambda + Y0 with |.| >= Y0.
  const MatrixXcd shifted =
      kJ * b_i.cast<Complex>() + y0 * MatrixXcd::Identity(n, n);
  const Complex h = -y_rt + (r * shifted.partialPivLu().solve(t)).value();
  return std::norm(h);
}

template <typename InnerStep>
BeamformingSolution solve_once(const MIMOScenario& scn,
                               const ArchitectureSpec& spec,
                               const SolveOptions& opts, std::uint64_t seed,
                               const std::optional<RisConfiguration>& init,
                               InnerStep inner) {
  RisConfiguration ris =
      init ? *init : random_feasible(spec, seed, scn.z0);
  ris.spec = spec;

  BeamformingSolution sol;
  for (int it = 0; it < opts.max_outer; ++it) {
    const MatrixXcd h = scenario_channel(scn, ris);
    auto [w, g] = update_beamformers(h);
    const double p = scn.p_t * std::norm((g * h * w).value());
    sol.w = w;
    sol.g = g;
    sol.trace.push_back(p);
    if (sol.trace.size() >= 2) {
      const double prev = sol.trace[sol.trace.size() - 2];
      if (std::abs(p - prev) <= opts.tol * std::max(prev, 1e-30)) {
        sol.converged = true;
        break;
      }
    }
    inner(w, g, ris);
  }
  sol.ris = ris;
  return sol;
}

template <typename InnerStep>
BeamformingSolution solve_with_restarts(const MIMOScenario& scn,
                                        const ArchitectureSpec& spec,
                                        const SolveOptions& opts,
                                        InnerStep inner) {
  scn.check();
  spec.check();
  if (scn.n_i() != spec.n_i) {
    throw ConfigError("optimize: scenario and architecture n_i differ");
  }
  BeamformingSolution best;
  const int restarts = std::max(1, opts.restarts);
  for (int r = 0; r < restarts; ++r) {
    const std::optional<RisConfiguration> init =
        r == 0 ? opts.init : std::nullopt;
    BeamformingSolution sol = solve_once(
        scn, spec, opts, opts.seed + std::uint64_t(r), init, inner);
    if (best.trace.empty() || sol.power() > best.power()) {
      best = std::move(sol);
    }
  }
  return best;
}

}  // namespace

void MIMOScenario::check() const {
  if (p_t <= 0.0 || z0 <= 0.0) {
    throw ConfigError("MIMOScenario: p_t and z0 must be positive");
  }
  if (blocks.ri.rows() != blocks.rt.rows() ||
      blocks.it.cols() != blocks.rt.cols() ||
      blocks.ri.cols() != blocks.it.rows()) {
    throw ConfigError("MIMOScenario: inconsistent block shapes");
  }
  if (z_ii && (z_ii->rows() != blocks.ri.cols() ||
               z_ii->cols() != blocks.ri.cols())) {
    throw ConfigError("MIMOScenario: coupling matrix shape mismatch");
  }
}

std::pair<VectorXcd, RowVectorXcd> update_beamformers(const MatrixXcd& h) {
  const int n_t = int(h.cols());
  const int n_r = int(h.rows());
  if (h.norm() == 0.0) {
    VectorXcd w = VectorXcd::Zero(n_t);
    w(0) = 1.0;
    RowVectorXcd g = RowVectorXcd::Zero(n_r);
    g(0) = 1.0;
    return {w, g};
  }
  Eigen::JacobiSVD<MatrixXcd> svd(h,
                                  Eigen::ComputeThinU | Eigen::ComputeThinV);
  VectorXcd w = svd.matrixV().col(0);
  for (int i = 0; i < w.size(); ++i) {
    if (std::abs(w(i)) > 1e-12) {
      w *= std::conj(w(i)) / std::abs(w(i));
      break;
    }
  }
  const VectorXcd hw = h * w;
  RowVectorXcd g;
  if (hw.norm() == 0.0) {
    g = RowVectorXcd::Zero(n_r);
    g(0) = 1.0;
  } else {
    g = hw.adjoint() / hw.norm();
  }
  return {w, g};
}

MatrixXcd scenario_channel(const MIMOScenario& scn,
                           const RisConfiguration& ris) {
  const int n = scn.n_i();
  const MatrixXcd eye = MatrixXcd::Identity(n, n);
  switch (scn.blocks.kind) {
    case NetworkKind::S:
      return scn.blocks.rt + scn.blocks.ri * ris.theta() * scn.blocks.it;
    case NetworkKind::Y: {
      const double y0 = 1.0 / scn.z0;
      // (jB + Y0 I)^-1 = (Theta + I) / (2 Y0) for any parameterization.
      const MatrixXcd m = (ris.theta() + eye) / (2.0 * y0);
      return (-scn.blocks.rt + scn.blocks.ri * m * scn.blocks.it) /
             (2.0 * y0);
    }
    case NetworkKind::Z: {
      const MatrixXcd z_ii = scn.z_ii ? *scn.z_ii : scn.z0 * eye;
      MatrixXcd z_i;
      if (ris.param == RisParameterization::reactance) {
        z_i = kJ * ris.values;
      } else {
        z_i = impedance_from_theta(ris.theta(), scn.z0).z();
      }
      const MatrixXcd core = guarded_solve(
          MatrixXcd(z_i + z_ii), scn.blocks.it, "scenario_channel: Z");
      return (scn.blocks.rt - scn.blocks.ri * core) / (2.0 * scn.z0);
    }
  }
  throw KindMismatch("scenario_channel: unknown kind");
}

MatrixXcd takagi_symmetric(const MatrixXcd& k, VectorXd* singular) {
  const int n = int(k.rows());
  const MatrixXcd sym = 0.5 * (k + k.transpose());
  MatrixXd h(2 * n, 2 * n);
  h << sym.real(), sym.imag(), sym.imag(), -sym.real();

  Eigen::SelfAdjointEigenSolver<MatrixXd> es(h);
  const VectorXd& evals = es.eigenvalues();
  const MatrixXd& evecs = es.eigenvectors();
  const double tau = 1e-10 * std::max(1.0, h.norm());

  std::vector<VectorXd> chosen;
  std::vector<double> sigmas;
  std::vector<int> near_zero;
  for (int i = 2 * n - 1; i >= 0; --i) {
    if (evals(i) > tau && int(chosen.size()) < n) {
      chosen.push_back(evecs.col(i));
      sigmas.push_back(evals(i));
    } else if (std::abs(evals(i)) <= tau) {
      near_zero.push_back(i);
    }
  }

  // Null directions come in J-pairs (J[p;q] = [q;-p] anticommutes with
  // the embedding); keep one representative per pair.
  auto jmap = [n](const VectorXd& v) {
    VectorXd out(2 * n);
    out.head(n) = v.tail(n);
    out.tail(n) = -v.head(n);
    return out;
  };
  std::vector<VectorXd> zero_picked;
  while (int(chosen.size() + zero_picked.size()) < n) {
    VectorXd best;
    double best_norm = -1.0;
    for (int idx : near_zero) {
      VectorXd v = evecs.col(idx);
      for (const VectorXd& z : zero_picked) {
        v -= z.dot(v) * z;
        const VectorXd jz = jmap(z);
        v -= jz.dot(v) * jz;
      }
      if (v.norm() > best_norm) {
        best_norm = v.norm();
        best = v;
      }
    }
    if (best_norm <= 1e-8) {
      throw SingularSystem("takagi_symmetric: degenerate null pairing");
    }
    zero_picked.push_back(best / best.norm());
  }
  for (const VectorXd& z : zero_picked) {
    chosen.push_back(z);
    sigmas.push_back(0.0);
  }

  MatrixXcd u(n, n);
  for (int c = 0; c < n; ++c) {
    u.col(c) = chosen[c].head(n).cast<Complex>() +
               kJ * chosen[c].tail(n).cast<Complex>();
  }
  if (singular) {
    *singular = Eigen::Map<VectorXd>(sigmas.data(), n);
  }
  return u;
}

BeamformingSolution optimize_s_group(const MIMOScenario& scn,
                                     const ArchitectureSpec& spec,
                                     const SolveOptions& opts) {
  if (scn.blocks.kind != NetworkKind::S) {
    throw KindMismatch("optimize_s_group: scenario must hold S blocks");
  }
  if (spec.family != ArchitectureFamily::single &&
      spec.family != ArchitectureFamily::group &&
      spec.family != ArchitectureFamily::fully) {
    throw ConfigError(
        "optimize_s_group: family must be single, group, or fully");
  }

  auto inner = [&](const VectorXcd& w, const RowVectorXcd& g,
                   RisConfiguration& ris) {
    const Effective eff = effective_scalars(scn.blocks, w, g);
    const AlignedTheta aligned =
        aligned_theta(spec, eff.rt, eff.ri, eff.it);
    const double current = std::abs(
        eff.rt + (eff.ri * ris.theta() * eff.it).value());
    const double candidate = std::abs(
        eff.rt + (eff.ri * aligned.theta * eff.it).value());
    if (candidate >= current) {
      ris.param = RisParameterization::scattering;
      ris.values = aligned.theta;
    }
  };
  return solve_with_restarts(scn, spec, opts, inner);
}

BeamformingSolution optimize_y_forest(const MIMOScenario& scn,
                                      const ArchitectureSpec& spec,
                                      const SolveOptions& opts) {
  if (scn.blocks.kind != NetworkKind::Y) {
    throw KindMismatch("optimize_y_forest: scenario must hold Y blocks");
  }
  if (spec.family != ArchitectureFamily::tree &&
      spec.family != ArchitectureFamily::forest) {
    throw ConfigError("optimize_y_forest: family must be tree or forest");
  }
  if (opts.init && opts.init->param != RisParameterization::susceptance) {
    throw ConfigError(
        "optimize_y_forest: initial state must be a susceptance matrix");
  }
  const double y0 = 1.0 / scn.z0;
  const int b = spec.block_size();

  auto inner = [&, y0, b](const VectorXcd& w, const RowVectorXcd& g,
                          RisConfiguration& ris) {
    const Effective eff = effective_scalars(scn.blocks, w, g);
    // Through (jB + Y0 I)^-1 = (Theta + I)/(2 Y0) the objective splits
    // into a state-independent part c and per-block unitary terms.
    const Complex c =
        -eff.rt + (eff.ri * eff.it).value() / (2.0 * y0);
    const double psi = std::abs(c) > 0.0 ? std::arg(c) : 0.0;

    MatrixXd current = ris.values.real();
    MatrixXd candidate = current;
    for (int grp = 0; grp < spec.groups(); ++grp) {
      const RowVectorXcd rg = eff.ri.segment(grp * b, b);
      const VectorXcd tg = eff.it.segment(grp * b, b);
      if (rg.norm() == 0.0 || tg.norm() == 0.0) continue;
      const VectorXcd x = tg / tg.norm();
      const VectorXcd target =
          std::exp(kJ * psi) * rg.conjugate().transpose() / rg.norm();
      candidate.block(grp * b, grp * b, b, b) =
          tridiagonal_alignment(x, target, y0);
    }

    double f_cur = y_objective(current, y0, eff.rt, eff.ri, eff.it);
    const double f_cand =
        y_objective(candidate, y0, eff.rt, eff.ri, eff.it);
    if (f_cand >= f_cur) {
      current = candidate;
      f_cur = f_cand;
    }

    // The alignment is generically exact; polish by coordinate ascent
    // only when a real gap to the per-block bound remains.
    double bound_amp = std::abs(c);
    for (int grp = 0; grp < spec.groups(); ++grp) {
      bound_amp += eff.ri.segment(grp * b, b).norm() *
                   eff.it.segment(grp * b, b).norm() / (2.0 * y0);
    }
    const double bound_sq = bound_amp * bound_amp;
    if (f_cur >= bound_sq * (1.0 - 1e-10)) {
      ris.param = RisParameterization::susceptance;
      ris.values = current.cast<Complex>();
      return;
    }

    // Cyclic coordinate ascent polish over the free susceptances.
    int budget = opts.inner_budget;
    const double radius = 20.0 * y0;
    for (int sweep = 0; sweep < 2 && budget > 0; ++sweep) {
      for (int grp = 0; grp < spec.groups() && budget > 0; ++grp) {
        for (int i = 0; i < b && budget > 0; ++i) {
          for (int j = i; j <= std::min(i + 1, b - 1) && budget > 0;
               ++j) {
            --budget;
            const int row = grp * b + i;
            const int col = grp * b + j;
            auto eval = [&](double val) {
              MatrixXd trial = current;
              trial(row, col) = trial(col, row) = val;
              return y_objective(trial, y0, eff.rt, eff.ri, eff.it);
            };
            // Bracket by coarse sampling, then golden-section refine.
            const double v0 = current(row, col);
            double best_v = v0;
            double best_f = f_cur;
            const int samples = 24;
            for (int s = 0; s <= samples; ++s) {
              const double v =
                  v0 - radius + 2.0 * radius * s / samples;
              const double f = eval(v);
              if (f > best_f) {
                best_f = f;
                best_v = v;
              }
            }
            double lo = best_v - 2.0 * radius / samples;
            double hi = best_v + 2.0 * radius / samples;
            const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
            double x1 = hi - gr * (hi - lo);
            double x2 = lo + gr * (hi - lo);
            double f1 = eval(x1);
            double f2 = eval(x2);
            for (int it = 0; it < 40; ++it) {
              if (f1 < f2) {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + gr * (hi - lo);
                f2 = eval(x2);
              } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - gr * (hi - lo);
                f1 = eval(x1);
              }
            }
            const double refined = f1 > f2 ? x1 : x2;
            const double f_ref = std::max(f1, f2);
            if (f_ref > best_f) {
              best_f = f_ref;
              best_v = refined;
            }
            if (best_f > f_cur) {
              current(row, col) = current(col, row) = best_v;
              f_cur = best_f;
            }
          }
        }
      }
    }
    ris.param = RisParameterization::susceptance;
    ris.values = current.cast<Complex>();
  };
  return solve_with_restarts(scn, spec, opts, inner);
}

BeamformingSolution optimize_z_group_mc(const MIMOScenario& scn,
                                        const ArchitectureSpec& spec,
                                        const SolveOptions& opts) {
  if (scn.blocks.kind != NetworkKind::Z) {
    throw KindMismatch("optimize_z_group_mc: scenario must hold Z blocks");
  }
  const int n = scn.n_i();
  const MatrixXcd z_ii =
      scn.z_ii ? *scn.z_ii : scn.z0 * MatrixXcd::Identity(n, n);
  const UnilateralMappings mapped =
      map_matched(scn.blocks.rt, scn.blocks.ri, scn.blocks.it, scn.z0);

  auto inner = [&](const VectorXcd& w, const RowVectorXcd& g,
                   RisConfiguration& ris) {
    const Effective eff = effective_scalars(scn.blocks, w, g);
    MatrixXd x = ris.param == RisParameterization::reactance
                     ? MatrixXd(ris.values.real())
                     : reactance_from_theta_blocks(ris.theta(), spec,
                                                   scn.z0);
    double f_cur = z_objective(x.cast<Complex>(), z_ii, eff.rt, eff.ri,
                               eff.it);

    // Gradient ascent with backtracking on the free reactances.
    for (int it = 0; it < opts.inner_budget; ++it) {
      const MatrixXcd shifted = kJ * x.cast<Complex>() + z_ii;
      if (safe_rcond(shifted) < kRcondThreshold) break;
      const Eigen::PartialPivLU<MatrixXcd> lu(shifted);
      const Complex h = eff.rt - (eff.ri * lu.solve(eff.it)).value();
      const VectorXcd u =
          (eff.ri * lu.inverse()).transpose();
      const VectorXcd v = lu.solve(eff.it);
      MatrixXd grad = MatrixXd::Zero(n, n);
      for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
          if (!spec.allowed(i, j)) continue;
          const Complex dh = i == j
                                 ? kJ * u(i) * v(i)
                                 : kJ * (u(i) * v(j) + u(j) * v(i));
          const double d = 2.0 * (std::conj(h) * dh).real();
          grad(i, j) = grad(j, i) = d;
        }
      }
      const double gnorm = grad.norm();
      if (gnorm < 1e-14 * (1.0 + std::abs(f_cur))) break;
      double alpha = (1.0 + x.norm()) / gnorm;
      bool accepted = false;
      for (int bt = 0; bt < 40; ++bt) {
        const MatrixXd trial = x + alpha * grad;
        const double f_trial = z_objective(trial.cast<Complex>(), z_ii,
                                           eff.rt, eff.ri, eff.it);
        if (f_trial > f_cur) {
          x = trial;
          f_cur = f_trial;
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!accepted) break;
    }

    // Candidate mapped from the S-formulation closed form; exact when
    // the RIS array is uncoupled, a warm direction otherwise.
    const RowVectorXcd r_s = g * mapped.s_ri;
    const VectorXcd t_s = mapped.s_it * w;
    const Complex c_s = (g * mapped.s_rt * w).value();
    const AlignedTheta aligned = aligned_theta(spec, c_s, r_s, t_s);
    try {
      const MatrixXd x_cand =
          reactance_from_theta_blocks(aligned.theta, spec, scn.z0);
      const double f_cand = z_objective(x_cand.cast<Complex>(), z_ii,
                                        eff.rt, eff.ri, eff.it);
      if (f_cand > f_cur) {
        x = x_cand;
        f_cur = f_cand;
      }
    } catch (const SingularConversion&) {
      // Theta has a unit eigenvalue; keep the gradient iterate.
    }

    ris.param = RisParameterization::reactance;
    ris.values = x.cast<Complex>();
  };
  return solve_with_restarts(scn, spec, opts, inner);
}

}  // namespace rismp
