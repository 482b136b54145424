#include "elab/qkzb.hpp"

#include <map>

namespace elab {

namespace {

cplx weight_of(const Chain& ch, int slot, int occ) {
  return ch.lambdas[static_cast<size_t>(slot)] - 2.0 * static_cast<double>(occ);
}

// R_{L_j, L_k}(zspec, lambda - 2 eta sum_{l in D} h^{(l)}) acting on slots (j, k).
// D is a slot set not containing j or k. 0-based slots.
OperatorOnFn rfactor(const SpacePtr& space, int j, int k, cplx zspec,
                     std::vector<int> D) {
  auto apply = [space, j, k, zspec, D](const ZeroWeightFn& f) -> ZeroWeightFn {
    auto inner = f.eval;
    return {space,
            [space, j, k, zspec, D, inner](cplx lam) -> Vec {
              const Chain& ch = space->chain;
              const Vec w = inner(lam);
              Vec out = Vec::Zero(space->dim());
              std::vector<char> done(static_cast<size_t>(space->dim()), 0);
              for (int p = 0; p < space->dim(); ++p) {
                if (done[static_cast<size_t>(p)]) continue;
                const WeightIndex& K = space->basis[static_cast<size_t>(p)];
                const int lvl = K[j] + K[k];
                cplx shift{0.0, 0.0};
                for (int l : D) shift += weight_of(ch, l, K[l]);
                const cplx lamdyn = lam - 2.0 * ch.ell.eta * shift;
                const Mat blk = ch.pair_block(j, k, zspec, lamdyn, lvl);
                const int base = ch.pair_base(j, k, lvl);
                // mixing group: same composition off (j,k)
                std::vector<int> members, occj;
                for (int i = std::max(0, lvl - ch.cap(k));
                     i <= std::min(ch.cap(j), lvl); ++i) {
                  std::vector<int> parts = K.parts;
                  parts[static_cast<size_t>(j)] = i;
                  parts[static_cast<size_t>(k)] = lvl - i;
                  const int q = space->find(WeightIndex{parts});
                  if (q >= 0) {
                    members.push_back(q);
                    occj.push_back(i);
                    done[static_cast<size_t>(q)] = 1;
                  }
                }
                for (size_t r = 0; r < members.size(); ++r) {
                  cplx acc{0.0, 0.0};
                  for (size_t c = 0; c < members.size(); ++c)
                    acc += blk(occj[r] - base, occj[c] - base) * w(members[c]);
                  out(members[r]) = acc;
                }
              }
              return out;
            },
            f.kind};
  };
  return {space, space, apply, {}};
}

std::vector<int> shift_set_plain(int j, int k) {
  // {0..k-1} \ {j} (0-based)
  std::vector<int> d;
  for (int l = 0; l < k; ++l)
    if (l != j) d.push_back(l);
  return d;
}

std::vector<int> shift_set_mirror(int j, int k, int n) {
  // {k+1..n-1} \ {j}
  std::vector<int> d;
  for (int l = k + 1; l < n; ++l)
    if (l != j) d.push_back(l);
  return d;
}

}  // namespace

OperatorOnFn compose(const OperatorOnFn& a, const OperatorOnFn& b) {
  auto fa = a.apply, fb = b.apply;
  std::vector<cplx> offs = b.offsets;
  offs.insert(offs.end(), a.offsets.begin(), a.offsets.end());
  return {b.in, a.out, [fa, fb](const ZeroWeightFn& f) { return fa(fb(f)); }, offs};
}

OperatorOnFn gamma_j(const SpacePtr& space, int j) {
  const int j0 = j - 1;
  auto apply = [space, j0](const ZeroWeightFn& f) -> ZeroWeightFn {
    auto inner = f.eval;
    return {space,
            [space, j0, inner](cplx lam) -> Vec {
              const Chain& ch = space->chain;
              // evaluate once per distinct slot weight
              std::map<int, Vec> cache;
              Vec out(space->dim());
              for (int p = 0; p < space->dim(); ++p) {
                const int occ = space->basis[static_cast<size_t>(p)][j0];
                auto it = cache.find(occ);
                if (it == cache.end()) {
                  const cplx mu = weight_of(ch, j0, occ);
                  it = cache.emplace(occ, inner(lam - 2.0 * ch.ell.eta * mu)).first;
                }
                out(p) = it->second(p);
              }
              return out;
            },
            f.kind};
  };
  std::vector<cplx> offs;
  for (int occ = 0; occ <= space->m; ++occ)
    offs.push_back(-2.0 * space->chain.ell.eta * weight_of(space->chain, j0, occ));
  return {space, space, apply, offs};
}

namespace {

OperatorOnFn kzb_impl(const SpacePtr& space, int j, cplx p, bool mirror) {
  const int n = space->chain.n();
  const int j0 = j - 1;
  const auto& z = space->chain.z;
  OperatorOnFn op{space, space,
                  [](const ZeroWeightFn& f) { return f; },
                  {}};
  if (!mirror) {
    // rightmost first: R_{j,j+1}(z_j - z_{j+1}) ... R_{j,n}(z_j - z_n)
    for (int k = j0 + 1; k < n; ++k)
      op = compose(rfactor(space, j0, k, z[static_cast<size_t>(j0)] - z[static_cast<size_t>(k)],
                           shift_set_plain(j0, k)),
                   op);
    op = compose(gamma_j(space, j), op);
    for (int k = 0; k < j0; ++k)
      op = compose(rfactor(space, j0, k,
                           z[static_cast<size_t>(j0)] - z[static_cast<size_t>(k)] + p,
                           shift_set_plain(j0, k)),
                   op);
  } else {
    // rightmost first: R^v_{j,j-1}(z_j - z_{j-1}) ... R^v_{j,1}(z_j - z_1)
    for (int k = j0 - 1; k >= 0; --k)
      op = compose(rfactor(space, j0, k, z[static_cast<size_t>(j0)] - z[static_cast<size_t>(k)],
                           shift_set_mirror(j0, k, n)),
                   op);
    op = compose(gamma_j(space, j), op);
    for (int k = n - 1; k > j0; --k)
      op = compose(rfactor(space, j0, k,
                           z[static_cast<size_t>(j0)] - z[static_cast<size_t>(k)] + p,
                           shift_set_mirror(j0, k, n)),
                   op);
  }
  return op;
}

}  // namespace

OperatorOnFn kzb_operator(const SpacePtr& space, int j, cplx p) {
  return kzb_impl(space, j, p, false);
}

OperatorOnFn mirror_kzb_operator(const SpacePtr& space, int j, cplx p) {
  return kzb_impl(space, j, p, true);
}

OperatorOnFn h_operator(const SpacePtr& space, int j) {
  return kzb_impl(space, j, cplx{0.0, 0.0}, false);
}

OperatorOnFn s_operator(const SpacePtr& space, int j, cplx zarg) {
  const int j0 = j - 1;
  Chain out_chain = space->chain;
  std::swap(out_chain.lambdas[static_cast<size_t>(j0)], out_chain.lambdas[static_cast<size_t>(j0 + 1)]);
  std::swap(out_chain.z[static_cast<size_t>(j0)], out_chain.z[static_cast<size_t>(j0 + 1)]);
  if (space->chain.finite)
    std::swap(out_chain.int_lambdas[static_cast<size_t>(j0)], out_chain.int_lambdas[static_cast<size_t>(j0 + 1)]);
  auto out_space = LevelSpace::make(out_chain, space->m);
  std::vector<int> D;
  for (int l = 0; l < j0; ++l) D.push_back(l);
  const OperatorOnFn rf = rfactor(space, j0, j0 + 1, zarg, D);
  auto apply = [space, out_space, rf, j0](const ZeroWeightFn& f) -> ZeroWeightFn {
    ZeroWeightFn rv = rf.apply(f);
    auto inner = rv.eval;
    return {out_space,
            [space, out_space, inner, j0](cplx lam) -> Vec {
              const Vec v = inner(lam);
              Vec out(out_space->dim());
              for (int p = 0; p < out_space->dim(); ++p) {
                std::vector<int> parts = out_space->basis[static_cast<size_t>(p)].parts;
                std::swap(parts[static_cast<size_t>(j0)], parts[static_cast<size_t>(j0 + 1)]);
                out(p) = v(space->find(WeightIndex{parts}));
              }
              return out;
            },
            f.kind};
  };
  return {space, out_space, apply, {}};
}

OperatorOnFn delta_operator(const SpacePtr& space) {
  const int n = space->chain.n();
  Chain out_chain = space->chain;
  std::rotate(out_chain.lambdas.rbegin(), out_chain.lambdas.rbegin() + 1, out_chain.lambdas.rend());
  std::rotate(out_chain.z.rbegin(), out_chain.z.rbegin() + 1, out_chain.z.rend());
  if (space->chain.finite)
    std::rotate(out_chain.int_lambdas.rbegin(), out_chain.int_lambdas.rbegin() + 1,
                out_chain.int_lambdas.rend());
  auto out_space = LevelSpace::make(out_chain, space->m);
  auto apply = [space, out_space, n](const ZeroWeightFn& f) -> ZeroWeightFn {
    auto inner = f.eval;
    return {out_space,
            [space, out_space, inner, n](cplx lam) -> Vec {
              const Chain& oc = out_space->chain;
              Vec out(out_space->dim());
              std::map<int, Vec> cache;
              for (int p = 0; p < out_space->dim(); ++p) {
                const WeightIndex& K = out_space->basis[static_cast<size_t>(p)];
                // pre-image under the cyclic relabeling
                std::vector<int> parts(K.parts.begin() + 1, K.parts.end());
                parts.push_back(K[0]);
                const cplx mu = oc.lambdas[0] - 2.0 * static_cast<double>(K[0]);
                // group Gamma_1 shifts by the slot-1 occupation
                auto it = cache.find(K[0]);
                if (it == cache.end())
                  it = cache.emplace(K[0], inner(lam - 2.0 * oc.ell.eta * mu)).first;
                out(p) = it->second(space->find(WeightIndex{parts}));
              }
              return out;
            },
            f.kind};
  };
  return {space, out_space, apply, {}};
}

OperatorOnFn reversal_operator(const SpacePtr& space) {
  Chain out_chain = space->chain;
  std::reverse(out_chain.lambdas.begin(), out_chain.lambdas.end());
  std::reverse(out_chain.z.begin(), out_chain.z.end());
  if (space->chain.finite)
    std::reverse(out_chain.int_lambdas.begin(), out_chain.int_lambdas.end());
  auto out_space = LevelSpace::make(out_chain, space->m);
  auto apply = [space, out_space](const ZeroWeightFn& f) -> ZeroWeightFn {
    auto inner = f.eval;
    return {out_space,
            [space, out_space, inner](cplx lam) -> Vec {
              const Vec v = inner(lam);
              Vec out(out_space->dim());
              for (int p = 0; p < out_space->dim(); ++p) {
                std::vector<int> parts = out_space->basis[static_cast<size_t>(p)].parts;
                std::reverse(parts.begin(), parts.end());
                out(p) = v(space->find(WeightIndex{parts}));
              }
              return out;
            },
            f.kind};
  };
  return {space, out_space, apply, {}};
}

OperatorOnFn weyl_reflection(const SpacePtr& space) {
  if (!space->chain.finite)
    throw std::invalid_argument("weyl_reflection: integer-weight quotients only");
  const auto& ep = space->chain.ell;
  // standard-basis factors [s(M)]!/[M]! from s_L E_j = E_{L-j}
  Vec fac(space->dim());
  std::vector<int> dualpos(static_cast<size_t>(space->dim()));
  for (int p = 0; p < space->dim(); ++p) {
    const WeightIndex& M = space->basis[static_cast<size_t>(p)];
    std::vector<int> dual(M.parts.size());
    cplx num{1.0, 0.0}, den{1.0, 0.0};
    for (size_t j = 0; j < M.parts.size(); ++j) {
      dual[j] = space->chain.int_lambdas[j] - M.parts[j];
      num *= elliptic_factorial(dual[j], ep);
      den *= elliptic_factorial(M.parts[j], ep);
    }
    fac(p) = num / den;
    dualpos[static_cast<size_t>(p)] = space->find(WeightIndex{dual});
  }
  auto apply = [space, fac, dualpos](const ZeroWeightFn& f) -> ZeroWeightFn {
    auto inner = f.eval;
    const bool reduced = f.kind == BasisKind::reduced;
    return {space,
            [space, fac, dualpos, inner, reduced](cplx lam) -> Vec {
              const Vec v = inner(-lam);
              Vec out(space->dim());
              for (int p = 0; p < space->dim(); ++p) {
                const int q = dualpos[static_cast<size_t>(p)];
                out(p) = reduced ? v(q) : fac(p) * v(q);
              }
              return out;
            },
            f.kind};
  };
  return {space, space, apply, {}};
}

OperatorOnFn transfer_operator(const SpacePtr& space, cplx w, TransferOrder order) {
  if (!space->chain.finite)
    throw std::invalid_argument("transfer_operator: integer-weight chains only");
  const Chain& ch = space->chain;
  const int n = ch.n();
  const auto& ep = ch.ell;

  // state lists for the total-weight +-1 sectors of aux (x) chain
  auto up_space = LevelSpace::make(ch, space->m - 1);    // aux=1 partners of a
  auto down_space = LevelSpace::make(ch, space->m + 1);  // aux=0 partners of d

  struct AuxStates {
    std::vector<std::pair<int, WeightIndex>> st;  // (aux occupation, chain index)
  };
  auto build_states = [&](bool for_a) {
    AuxStates s;
    for (const auto& M : space->basis) s.st.emplace_back(for_a ? 0 : 1, M);
    const auto& other = for_a ? up_space : down_space;
    for (const auto& M : other->basis) s.st.emplace_back(for_a ? 1 : 0, M);
    return s;
  };
  const AuxStates sa = build_states(true);
  const AuxStates sd = build_states(false);

  auto lop_matrix = [n, ch, ep, w, order, space](const AuxStates& st, cplx lam) -> Mat {
    const int dim = static_cast<int>(st.st.size());
    auto find_state = [&](int aux, const WeightIndex& M) {
      for (int q = 0; q < dim; ++q)
        if (st.st[static_cast<size_t>(q)].first == aux &&
            st.st[static_cast<size_t>(q)].second == M)
          return q;
      return -1;
    };
    Mat T = Mat::Zero(dim, dim);
    for (int q = 0; q < dim; ++q) T(q, q) = 1.0;
    // geometric order applies factor 1 first with prefix shifts; chain order
    // applies factor n first with suffix shifts
    for (int step = 0; step < n; ++step) {
      const int k = order == TransferOrder::geometric ? step : n - 1 - step;
      Mat next = Mat::Zero(dim, dim);
      std::vector<char> done(static_cast<size_t>(dim), 0);
      for (int p = 0; p < dim; ++p) {
        if (done[static_cast<size_t>(p)]) continue;
        const auto& [aux, K] = st.st[static_cast<size_t>(p)];
        const int lvl = aux + K[k];
        cplx shift{0.0, 0.0};
        if (order == TransferOrder::geometric) {
          for (int l = 0; l < k; ++l) shift += weight_of(ch, l, K[l]);
        } else {
          for (int l = k + 1; l < n; ++l) shift += weight_of(ch, l, K[l]);
        }
        const cplx lamdyn = lam - 2.0 * ep.eta * shift;
        const int Lk = ch.int_lambdas[static_cast<size_t>(k)];
        const Mat blk = (Lk == 1) ? fundamental_block(w - ch.z[static_cast<size_t>(k)], lamdyn, lvl, ep).entries
                                  : quotient_rmatrix(1, Lk, w - ch.z[static_cast<size_t>(k)], lamdyn, lvl, ep).entries;
        const int base = std::max(0, lvl - Lk);
        std::vector<int> members, auxocc;
        for (int i = std::max(0, lvl - Lk); i <= std::min(1, lvl); ++i) {
          std::vector<int> parts = K.parts;
          parts[static_cast<size_t>(k)] = lvl - i;
          const int q = find_state(i, WeightIndex{parts});
          if (q >= 0) {
            members.push_back(q);
            auxocc.push_back(i);
            done[static_cast<size_t>(q)] = 1;
          }
        }
        for (size_t r = 0; r < members.size(); ++r)
          for (size_t c = 0; c < members.size(); ++c)
            next.row(members[r]) += blk(auxocc[r] - base, auxocc[c] - base) * T.row(members[c]);
      }
      T = next;
    }
    return T;
  };

  const int d0 = space->dim();
  auto apply = [space, sa, sd, lop_matrix, d0, ep](const ZeroWeightFn& f) -> ZeroWeightFn {
    auto inner = f.eval;
    return {space,
            [space, sa, sd, lop_matrix, d0, ep, inner](cplx lam) -> Vec {
              const Mat Ta = lop_matrix(sa, lam);
              const Mat Td = lop_matrix(sd, lam);
              const Vec um = inner(lam - 2.0 * ep.eta);
              const Vec up = inner(lam + 2.0 * ep.eta);
              Vec out = Vec::Zero(d0);
              // a = <aux 0| L |aux 0> block, d = <aux 1| L |aux 1> block
              for (int r = 0; r < d0; ++r)
                for (int c = 0; c < d0; ++c) {
                  out(r) += Ta(r, c) * um(c);
                  out(r) += Td(r, c) * up(c);
                }
              return out;
            },
            f.kind};
  };
  return {space, space, apply, {-2.0 * ep.eta, 2.0 * ep.eta}};
}

double resonance_condition_residual(const ZeroWeightFn& u, int which, cplx p,
                                    int r, int s) {
  const auto& space = *u.space;
  const Chain& ch = space.chain;
  const auto& ep = ch.ell;
  const int n = ch.n();
  const cplx rs = static_cast<double>(r) + static_cast<double>(s) * ep.tau;
  double worst = 0.0;
  // reduced-form relations carry elliptic factorial weights on both sides
  for (int pa = 0; pa < space.dim(); ++pa) {
    const WeightIndex& M = space.basis[static_cast<size_t>(pa)];
    for (int pb = 0; pb < space.dim(); ++pb) {
      if (pa == pb) continue;
      const WeightIndex& L = space.basis[static_cast<size_t>(pb)];
      if (which < n) {
        const int j0 = which - 1;
        bool same = true;
        for (int l = 0; l < n; ++l)
          if (l != j0 && l != j0 + 1 && M[l] != L[l]) same = false;
        if (!same) continue;
        const int k = M[j0] + M[j0 + 1];
        if (L[j0] + L[j0 + 1] != k) continue;
        const int a = M[j0], b = L[j0];
        cplx prefix{0.0, 0.0};
        for (int l = 0; l < j0; ++l) prefix += weight_of(ch, l, M[l]);
        const cplx lam0 = rs + 2.0 * ep.eta * (ch.lambdas[static_cast<size_t>(j0)] -
                                               static_cast<double>(a + b) + prefix);
        const cplx base = ch.z[static_cast<size_t>(j0 + 1)] - ch.z[static_cast<size_t>(j0)] +
                          ep.eta * (ch.lambdas[static_cast<size_t>(j0 + 1)] +
                                    ch.lambdas[static_cast<size_t>(j0)]);
        const cplx lhs = elliptic_factorial(a, ep) * elliptic_factorial(k - a, ep) *
                         std::exp(2.0 * kPi * kI * static_cast<double>(s * a) * base) *
                         u(lam0)(pa);
        const cplx rhs = elliptic_factorial(b, ep) * elliptic_factorial(k - b, ep) *
                         std::exp(2.0 * kPi * kI * static_cast<double>(s * b) * base) *
                         u(lam0)(pb);
        worst = std::max(worst, std::abs(lhs - rhs));
      } else {
        bool same = true;
        for (int l = 1; l < n - 1; ++l)
          if (M[l] != L[l]) same = false;
        if (!same) continue;
        const int k = M[0] + M[n - 1];
        if (L[0] + L[n - 1] != k) continue;
        const int a = M[n - 1], b = L[n - 1];
        if (a == b) continue;
        const cplx base = ch.z[0] - ch.z[static_cast<size_t>(n - 1)] +
                          ep.eta * (ch.lambdas[0] + ch.lambdas[static_cast<size_t>(n - 1)]) - p;
        const cplx lhs = elliptic_factorial(a, ep) * elliptic_factorial(k - a, ep) *
                         std::exp(2.0 * kPi * kI * static_cast<double>(s * a) * base) *
                         u(rs + 2.0 * ep.eta * static_cast<double>(a - b))(pa);
        const cplx rhs = elliptic_factorial(b, ep) * elliptic_factorial(k - b, ep) *
                         std::exp(2.0 * kPi * kI * static_cast<double>(s * b) * base) *
                         u(rs + 2.0 * ep.eta * static_cast<double>(b - a))(pb);
        worst = std::max(worst, std::abs(lhs - rhs));
      }
    }
  }
  return worst;
}

double operator_residual(const OperatorOnFn& a, const OperatorOnFn& b,
                         int n_fns, std::span<const cplx> lambdas, uint64_t seed) {
  double worst = 0.0;
  for (int f = 0; f < n_fns; ++f) {
    const ZeroWeightFn u = random_test_fn(a.in, seed + static_cast<uint64_t>(f));
    const ZeroWeightFn au = a.apply(u), bu = b.apply(u);
    for (cplx lam : lambdas) {
      const Vec va = au(lam), vb = bu(lam);
      const double scale = std::max({1.0, va.lpNorm<Eigen::Infinity>(),
                                     vb.lpNorm<Eigen::Infinity>()});
      worst = std::max(worst, (va - vb).lpNorm<Eigen::Infinity>() / scale);
    }
  }
  return worst;
}

}  // namespace elab
