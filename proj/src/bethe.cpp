#include "elab/bethe.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "elab/sampling.hpp"

namespace elab {

namespace {

cplx wrap_2pii(cplx v) {
  return v - 2.0 * kPi * kI * std::round(v.imag() / (2.0 * kPi));
}

cplx log_theta(cplx t, const EllipticParams& ep) { return std::log(theta(t, ep)); }

struct BaeTerms {
  // F_i(t) = sum log-theta terms + rhs_log; wrapped to the 2 pi i strip
  const BetheProblem& pb;
  const EllipticParams& ep;

  explicit BaeTerms(const BetheProblem& p) : pb(p), ep(p.model.ell) {}

  cplx F(std::span<const cplx> t, int i) const {
    const auto& mp = pb.model;
    cplx acc{0.0, 0.0};
    if (pb.variant == BetheVariant::transfer) {
      for (size_t j = 0; j < t.size(); ++j) {
        if (static_cast<int>(j) == i) continue;
        acc += log_theta(t[j] - t[static_cast<size_t>(i)] - 2.0 * ep.eta, ep) -
               log_theta(t[j] - t[static_cast<size_t>(i)] + 2.0 * ep.eta, ep);
      }
      for (int k = 0; k < mp.n(); ++k) {
        acc += log_theta(t[static_cast<size_t>(i)] - mp.z[static_cast<size_t>(k)] -
                             (1.0 + mp.lambdas[static_cast<size_t>(k)]) * ep.eta, ep) -
               log_theta(t[static_cast<size_t>(i)] - mp.z[static_cast<size_t>(k)] -
                             (1.0 - mp.lambdas[static_cast<size_t>(k)]) * ep.eta, ep);
      }
      acc -= 4.0 * ep.eta * pb.c;
    } else {
      for (int k = 0; k < mp.n(); ++k) {
        acc += log_theta(t[static_cast<size_t>(i)] - mp.z[static_cast<size_t>(k)] + mp.a(k), ep) -
               log_theta(t[static_cast<size_t>(i)] - mp.z[static_cast<size_t>(k)] - mp.a(k), ep);
      }
      for (size_t j = 0; j < t.size(); ++j) {
        if (static_cast<int>(j) == i) continue;
        acc += log_theta(t[static_cast<size_t>(i)] - t[j] - 2.0 * ep.eta, ep) -
               log_theta(t[static_cast<size_t>(i)] - t[j] + 2.0 * ep.eta, ep);
      }
      acc += 4.0 * ep.eta * pb.c;
    }
    return wrap_2pii(acc);
  }

  void jacobian_row(std::span<const cplx> t, int i, Vec& row) const {
    const auto& mp = pb.model;
    row.setZero();
    if (pb.variant == BetheVariant::transfer) {
      for (size_t j = 0; j < t.size(); ++j) {
        if (static_cast<int>(j) == i) continue;
        const cplx dm = theta_dlog(t[j] - t[static_cast<size_t>(i)] - 2.0 * ep.eta, ep);
        const cplx dp = theta_dlog(t[j] - t[static_cast<size_t>(i)] + 2.0 * ep.eta, ep);
        row(static_cast<Eigen::Index>(j)) += dm - dp;
        row(i) -= dm - dp;
      }
      for (int k = 0; k < mp.n(); ++k) {
        row(i) += theta_dlog(t[static_cast<size_t>(i)] - mp.z[static_cast<size_t>(k)] -
                                 (1.0 + mp.lambdas[static_cast<size_t>(k)]) * ep.eta, ep) -
                  theta_dlog(t[static_cast<size_t>(i)] - mp.z[static_cast<size_t>(k)] -
                                 (1.0 - mp.lambdas[static_cast<size_t>(k)]) * ep.eta, ep);
      }
    } else {
      for (int k = 0; k < mp.n(); ++k) {
        row(i) += theta_dlog(t[static_cast<size_t>(i)] - mp.z[static_cast<size_t>(k)] + mp.a(k), ep) -
                  theta_dlog(t[static_cast<size_t>(i)] - mp.z[static_cast<size_t>(k)] - mp.a(k), ep);
      }
      for (size_t j = 0; j < t.size(); ++j) {
        if (static_cast<int>(j) == i) continue;
        const cplx dm = theta_dlog(t[static_cast<size_t>(i)] - t[j] - 2.0 * ep.eta, ep);
        const cplx dp = theta_dlog(t[static_cast<size_t>(i)] - t[j] + 2.0 * ep.eta, ep);
        row(i) += dm - dp;
        row(static_cast<Eigen::Index>(j)) -= dm - dp;
      }
    }
  }
};

cplx rhs_value(const BetheProblem& pb) {
  const cplx e = pb.model.ell.eta;
  return pb.variant == BetheVariant::transfer ? std::exp(4.0 * e * pb.c)
                                              : std::exp(-4.0 * e * pb.c);
}

}  // namespace

Vec bae_log_residual(const BetheProblem& pb, std::span<const cplx> roots) {
  BaeTerms bt(pb);
  Vec out(static_cast<Eigen::Index>(roots.size()));
  for (size_t i = 0; i < roots.size(); ++i) out(static_cast<Eigen::Index>(i)) = bt.F(roots, static_cast<int>(i));
  return out;
}

Vec bae_residual(const BetheProblem& pb, std::span<const cplx> roots) {
  const auto& mp = pb.model;
  const auto& ep = mp.ell;
  Vec out(static_cast<Eigen::Index>(roots.size()));
  const cplx rhs = rhs_value(pb);
  for (size_t i = 0; i < roots.size(); ++i) {
    cplx prod{1.0, 0.0};
    if (pb.variant == BetheVariant::transfer) {
      for (size_t j = 0; j < roots.size(); ++j) {
        if (j == i) continue;
        prod *= theta(roots[j] - roots[i] - 2.0 * ep.eta, ep) /
                theta(roots[j] - roots[i] + 2.0 * ep.eta, ep);
      }
      for (int k = 0; k < mp.n(); ++k)
        prod *= theta(roots[i] - mp.z[static_cast<size_t>(k)] -
                          (1.0 + mp.lambdas[static_cast<size_t>(k)]) * ep.eta, ep) /
                theta(roots[i] - mp.z[static_cast<size_t>(k)] -
                          (1.0 - mp.lambdas[static_cast<size_t>(k)]) * ep.eta, ep);
    } else {
      for (int k = 0; k < mp.n(); ++k)
        prod *= theta(roots[i] - mp.z[static_cast<size_t>(k)] + mp.a(k), ep) /
                theta(roots[i] - mp.z[static_cast<size_t>(k)] - mp.a(k), ep);
      for (size_t j = 0; j < roots.size(); ++j) {
        if (j == i) continue;
        prod *= theta(roots[i] - roots[j] - 2.0 * ep.eta, ep) /
                theta(roots[i] - roots[j] + 2.0 * ep.eta, ep);
      }
    }
    out(static_cast<Eigen::Index>(i)) = prod - rhs;
  }
  return out;
}

namespace {

struct NewtonOutcome {
  bool ok = false;
  std::vector<cplx> roots;
  double lognorm = 1e300;
  std::string note;
};

NewtonOutcome newton_polish(const BetheProblem& pb, std::vector<cplx> t,
                            const SolveOptions& opt) {
  BaeTerms bt(pb);
  const int m = static_cast<int>(t.size());
  NewtonOutcome out;
  Vec F(m);
  Mat J(m, m);
  Vec row(m);
  auto eval_all = [&](const std::vector<cplx>& x, Vec& f) {
    for (int i = 0; i < m; ++i) f(i) = bt.F(x, i);
    return f.lpNorm<Eigen::Infinity>();
  };
  double fn;
  try {
    fn = eval_all(t, F);
  } catch (const std::exception&) {
    out.note = "seed hit a lattice zero";
    return out;
  }
  for (int it = 0; it < opt.newton_iters && fn > opt.target; ++it) {
    try {
      for (int i = 0; i < m; ++i) {
        bt.jacobian_row(t, i, row);
        J.row(i) = row;
      }
      const Vec step = J.partialPivLu().solve(F);
      double damp = 1.0;
      bool moved = false;
      for (int half = 0; half < 7; ++half, damp *= 0.5) {
        std::vector<cplx> cand = t;
        for (int i = 0; i < m; ++i) cand[static_cast<size_t>(i)] -= damp * step(i);
        Vec Fc(m);
        double fc;
        try {
          fc = eval_all(cand, Fc);
        } catch (const std::exception&) {
          continue;
        }
        if (fc < fn) {
          t = std::move(cand);
          F = Fc;
          fn = fc;
          moved = true;
          break;
        }
      }
      if (!moved) break;
    } catch (const std::exception&) {
      out.note = "newton step failed";
      return out;
    }
    if (!std::isfinite(fn)) {
      out.note = "divergence";
      return out;
    }
  }
  // root collision guard (modulo the lattice)
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (lattice_distance(t[static_cast<size_t>(i)] - t[static_cast<size_t>(j)],
                           pb.model.ell.tau) < 1e-6) {
        out.note = "root collision";
        return out;
      }
  out.ok = fn <= opt.target;
  out.roots = std::move(t);
  out.lognorm = fn;
  if (!out.ok) out.note = "newton did not reach target";
  return out;
}

std::vector<cplx> canonical_roots(std::vector<cplx> t) {
  for (auto& x : t) x -= std::floor(x.real() + 0.5);  // Re into [-1/2, 1/2)
  std::sort(t.begin(), t.end(), [](cplx a, cplx b) {
    if (std::abs(a.real() - b.real()) > 1e-12) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return t;
}

}  // namespace

BetheSolution solve_bae_from(const BetheProblem& pb, std::span<const cplx> seeds,
                             const SolveOptions& opt) {
  BetheSolution sol;
  for (size_t i = 0; i < seeds.size(); ++i)
    for (size_t j = i + 1; j < seeds.size(); ++j)
      if (std::abs(seeds[i] - seeds[j]) < 1e-9) {
        sol.trace.push_back("seed rejected: coincident roots");
        return sol;
      }
  NewtonOutcome nw = newton_polish(pb, {seeds.begin(), seeds.end()}, opt);
  if (!nw.ok) {
    sol.trace.push_back("polish failed: " + nw.note);
    return sol;
  }
  sol.roots = canonical_roots(nw.roots);
  sol.residual = bae_residual(pb, sol.roots).lpNorm<Eigen::Infinity>();
  sol.ok = true;
  std::ostringstream os;
  os << "polished to log-residual " << nw.lognorm;
  sol.trace.push_back(os.str());
  return sol;
}

std::vector<BetheSolution> solve_bae_all(const BetheProblem& pb, const SolveOptions& opt) {
  std::vector<BetheSolution> out;
  const cplx tau_t = pb.model.ell.tau;
  const double im0 = std::max(opt.start_im_tau, tau_t.imag());
  const cplx tau_0{tau_t.real(), im0};

  // deterministic seed cloud around the evaluation points
  cplx zbar{0.0, 0.0};
  for (const cplx& zz : pb.model.z) zbar += zz;
  zbar /= static_cast<double>(pb.model.n());
  std::vector<std::vector<cplx>> seeds;
  Sampler smp(opt.seed);
  for (int s = 0; s < opt.multistart; ++s) {
    std::vector<cplx> t(static_cast<size_t>(pb.m));
    for (int i = 0; i < pb.m; ++i) {
      const double spread = 0.61 / std::max(1, pb.m);
      t[static_cast<size_t>(i)] = zbar +
                                  spread * (static_cast<double>(i) - 0.5 * (pb.m - 1)) +
                                  smp.box(-0.3, 0.3, -0.18, 0.18);
    }
    seeds.push_back(std::move(t));
  }

  for (const auto& seed : seeds) {
    BetheProblem cur = pb;
    cur.model.ell.tau = tau_0;
    NewtonOutcome nw = newton_polish(cur, seed, opt);
    if (!nw.ok) continue;
    // continue tau_0 -> tau_t
    bool lost = false;
    for (int step = 1; step <= opt.continuation_steps; ++step) {
      const double sfrac = static_cast<double>(step) / opt.continuation_steps;
      cur.model.ell.tau = tau_0 + sfrac * (tau_t - tau_0);
      nw = newton_polish(cur, nw.roots, opt);
      if (!nw.ok) {
        lost = true;
        break;
      }
    }
    if (lost || !nw.ok) continue;
    BetheSolution cand;
    cand.roots = canonical_roots(nw.roots);
    cand.residual = bae_residual(pb, cand.roots).lpNorm<Eigen::Infinity>();
    cand.ok = true;
    std::ostringstream os;
    os << "continuation in " << opt.continuation_steps
       << " steps from Im tau = " << im0 << "; log-residual " << nw.lognorm;
    cand.trace.push_back(os.str());
    bool dup = false;
    for (const auto& prev : out) {
      double d = 0.0;
      for (size_t i = 0; i < cand.roots.size(); ++i)
        d = std::max(d, lattice_distance(cand.roots[i] - prev.roots[i], tau_t));
      if (d < 1e-8) dup = true;
    }
    if (!dup) out.push_back(std::move(cand));
  }
  std::sort(out.begin(), out.end(),
            [](const BetheSolution& a, const BetheSolution& b) {
              return a.residual < b.residual;
            });
  return out;
}

BetheSolution solve_bae(const BetheProblem& pb, const SolveOptions& opt) {
  std::vector<BetheSolution> all = solve_bae_all(pb, opt);
  if (all.empty()) {
    BetheSolution none;
    none.trace.push_back("no seed converged");
    return none;
  }
  return all.front();
}

namespace {

constexpr cplx kRefLambda{0.2117, 0.0431};

ZeroWeightFn normalized(ZeroWeightFn f) {
  const Vec v = f.eval(kRefLambda);
  cplx big{0.0, 0.0};
  for (int i = 0; i < v.size(); ++i)
    if (std::abs(v(i)) > std::abs(big)) big = v(i);
  if (std::abs(big) < 1e-300) return f;
  return scale(f, 1.0 / big);
}

}  // namespace

ZeroWeightFn eigenfunction_h(const BetheSolution& sol, const SpacePtr& space, cplx c) {
  if (!sol.ok) throw std::invalid_argument("eigenfunction_h: unsolved problem");
  const std::vector<cplx> roots = sol.roots;
  ModelParams mp{space->chain.lambdas, space->chain.z, space->chain.ell};
  ZeroWeightFn f{space,
                 [space, roots, mp, c](cplx lam) -> Vec {
                   Vec v(space->dim());
                   for (int p = 0; p < space->dim(); ++p)
                     v(p) = std::exp(c * lam) *
                            weight_fn(space->basis[static_cast<size_t>(p)], roots, lam, mp);
                   return v;
                 },
                 BasisKind::standard};
  return normalized(f);
}

ZeroWeightFn eigenfunction_transfer(const BetheSolution& sol, const SpacePtr& space, cplx c) {
  if (!sol.ok) throw std::invalid_argument("eigenfunction_transfer: unsolved problem");
  ModelParams mp{space->chain.lambdas, space->chain.z, space->chain.ell};
  const auto& ep = mp.ell;
  // mirror weight functions take the bae2 roots shifted by -eta
  std::vector<cplx> ts(sol.roots);
  for (auto& x : ts) x -= ep.eta;
  cplx pref{1.0, 0.0};
  for (size_t i = 0; i < ts.size(); ++i)
    for (size_t j = i + 1; j < ts.size(); ++j)
      pref *= theta(ts[i] - ts[j] + 2.0 * ep.eta, ep) / theta(ts[i] - ts[j], ep);
  const double msign = (ts.size() % 2 == 0) ? 1.0 : -1.0;
  const cplx scale0 = msign * pref;
  const double m = static_cast<double>(ts.size());
  ZeroWeightFn f{space,
                 [space, ts, mp, c, scale0, m](cplx lam) -> Vec {
                   const cplx epr = std::exp(c * (lam + 2.0 * mp.ell.eta * m)) * scale0;
                   Vec v(space->dim());
                   for (int p = 0; p < space->dim(); ++p)
                     v(p) = epr * mirror_weight_fn(space->basis[static_cast<size_t>(p)], ts, lam, mp);
                   return v;
                 },
                 BasisKind::standard};
  return normalized(f);
}

cplx h_eigenvalue(const BetheProblem& pb, std::span<const cplx> roots, int j) {
  const auto& mp = pb.model;
  const auto& ep = mp.ell;
  const int j0 = j - 1;
  cplx prod = std::exp(-2.0 * pb.c * ep.eta * mp.lambdas[static_cast<size_t>(j0)]);
  for (const cplx& t : roots)
    prod *= theta(t - mp.z[static_cast<size_t>(j0)] - mp.a(j0), ep) /
            theta(t - mp.z[static_cast<size_t>(j0)] + mp.a(j0), ep);
  return prod;
}

cplx transfer_eigenvalue_verma(const BetheProblem& pb, std::span<const cplx> roots, cplx w) {
  const auto& mp = pb.model;
  const auto& ep = mp.ell;
  cplx t1 = std::exp(-2.0 * ep.eta * pb.c), t2 = std::exp(2.0 * ep.eta * pb.c);
  for (const cplx& t : roots) {
    t1 *= theta(t - w - 2.0 * ep.eta, ep) / theta(t - w, ep);
    t2 *= theta(t - w + 2.0 * ep.eta, ep) / theta(t - w, ep);
  }
  for (int k = 0; k < mp.n(); ++k)
    t2 *= theta(w - mp.z[static_cast<size_t>(k)] - (1.0 - mp.lambdas[static_cast<size_t>(k)]) * ep.eta, ep) /
          theta(w - mp.z[static_cast<size_t>(k)] - (1.0 + mp.lambdas[static_cast<size_t>(k)]) * ep.eta, ep);
  return t1 + t2;
}

cplx transfer_eigenvalue_fundamental(const BetheProblem& pb, std::span<const cplx> roots, cplx w) {
  const auto& mp = pb.model;
  const auto& ep = mp.ell;
  cplx t1 = std::exp(-2.0 * ep.eta * pb.c), t2 = std::exp(2.0 * ep.eta * pb.c);
  for (const cplx& t : roots) {
    t1 *= theta(t - w - ep.eta, ep) / theta(t - w + ep.eta, ep);
    t2 *= theta(t - w + 3.0 * ep.eta, ep) / theta(t - w + ep.eta, ep);
  }
  for (int k = 0; k < mp.n(); ++k)
    t2 *= theta(w - mp.z[static_cast<size_t>(k)], ep) /
          theta(w - mp.z[static_cast<size_t>(k)] - 2.0 * ep.eta, ep);
  return t1 + t2;
}

ZeroWeightFn antisymmetrize(const ZeroWeightFn& psi) {
  const OperatorOnFn S = weyl_reflection(psi.space);
  return psi - S.apply(psi);
}

namespace {

double pair_resonance(const ZeroWeightFn& psi, int slot_a, int slot_b,
                      bool suffix_sums, bool wraparound) {
  // reduced relations: W_M(lam0) = W_L(lam0'), lam0' = lam0 except for the
  // wrap-around family where the sign of lambda flips with the index swap
  const ZeroWeightFn u = to_reduced(psi);
  const auto& space = *psi.space;
  const Chain& ch = space.chain;
  const auto& ep = ch.ell;
  const int n = ch.n();
  double worst = 0.0;
  for (int pa = 0; pa < space.dim(); ++pa) {
    for (int pb = 0; pb < space.dim(); ++pb) {
      if (pa == pb) continue;
      const WeightIndex& M = space.basis[static_cast<size_t>(pa)];
      const WeightIndex& L = space.basis[static_cast<size_t>(pb)];
      bool same = true;
      for (int l = 0; l < n; ++l)
        if (l != slot_a && l != slot_b && M[l] != L[l]) same = false;
      if (!same || M[slot_a] + M[slot_b] != L[slot_a] + L[slot_b]) continue;
      cplx lamM, lamL;
      if (!wraparound) {
        cplx tail{0.0, 0.0};
        if (suffix_sums) {
          for (int l = slot_b + 1; l < n; ++l)
            tail += ch.lambdas[static_cast<size_t>(l)] - 2.0 * static_cast<double>(M[l]);
        } else {
          for (int l = 0; l < slot_a; ++l)
            tail += ch.lambdas[static_cast<size_t>(l)] - 2.0 * static_cast<double>(M[l]);
        }
        const int aa = suffix_sums ? M[slot_b] : M[slot_a];
        const int bb = suffix_sums ? L[slot_b] : L[slot_a];
        const cplx Lj = ch.lambdas[static_cast<size_t>(suffix_sums ? slot_b : slot_a)];
        lamM = 2.0 * ep.eta * (Lj - static_cast<double>(aa + bb) + tail);
        lamL = lamM;
      } else {
        const int a = suffix_sums ? M[0] : M[n - 1];
        const int b = suffix_sums ? L[0] : L[n - 1];
        lamM = 2.0 * ep.eta * static_cast<double>(a - b);
        lamL = 2.0 * ep.eta * static_cast<double>(b - a);
      }
      const cplx lhs = u(lamM)(pa);
      const cplx rhs = u(lamL)(pb);
      const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
      worst = std::max(worst, std::abs(lhs - rhs) / scale);
    }
  }
  return worst;
}

}  // namespace

double transfer_resonance_residual(const ZeroWeightFn& psi, int which) {
  const int n = psi.space->chain.n();
  if (which == 1) return pair_resonance(psi, 0, n - 1, true, true);
  return pair_resonance(psi, which - 2, which - 1, true, false);
}

double h_resonance_residual(const ZeroWeightFn& psi, int which) {
  const int n = psi.space->chain.n();
  if (which == n) return pair_resonance(psi, 0, n - 1, false, true);
  return pair_resonance(psi, which - 1, which, false, false);
}

VanishingReport vanishing_report(const ZeroWeightFn& apsi, std::optional<int> N, cplx c,
                                 FusionKind kind) {
  const auto& space = *apsi.space;
  if (!space.chain.finite)
    throw std::invalid_argument("vanishing_report: integer weights required");
  if (N && std::abs(std::exp(2.0 * c) - 1.0) > 1e-9)
    throw std::invalid_argument("vanishing_report: N-periodic case needs e^{2c} = 1");
  const auto& lam_int = space.chain.int_lambdas;
  const auto& ep = space.chain.ell;
  if (N) {
    const cplx expect = 1.0 / (2.0 * static_cast<double>(*N));
    if (std::abs(ep.eta - expect) > 1e-12)
      throw std::invalid_argument("vanishing_report: eta must equal 1/(2N)");
  }
  const ZeroWeightFn ar = to_reduced(apsi);

  VanishingReport rep;
  rep.max_forced = 0.0;
  rep.min_unforced = 1e300;
  const int Nv = N ? *N : 0;
  for (int p = 0; p < space.dim(); ++p) {
    const WeightIndex& M = space.basis[static_cast<size_t>(p)];
    const std::vector<int> w = index_weight_vector(M, lam_int);
    std::vector<int> mw(w.size());
    for (size_t i = 0; i < w.size(); ++i) mw[i] = -w[i];
    int klo, khi;
    if (N) {
      klo = 0;
      khi = *N - 1;
    } else {
      klo = -shift_number(w, lam_int) - 2;
      khi = shift_number(mw, lam_int) + 2;
    }
    for (int k = klo; k <= khi; ++k) {
      VanishingRow row;
      row.M = M;
      row.k = k;
      row.forced = vanishing_support(M, lam_int, kind, k, Nv);
      row.magnitude = std::abs(ar(2.0 * ep.eta * static_cast<double>(k))(p));
      if (row.forced)
        rep.max_forced = std::max(rep.max_forced, row.magnitude);
      else
        rep.min_unforced = std::min(rep.min_unforced, row.magnitude);
      rep.rows.push_back(std::move(row));
    }
  }
  if (rep.min_unforced == 1e300) rep.min_unforced = 0.0;
  return rep;
}

}  // namespace elab
