#include "elab/rmatrix.hpp"

#include <Eigen/SVD>
#include <json.hpp>

namespace elab {

namespace {

std::vector<std::pair<int, int>> level_indices(int m, int max_i, int max_j) {
  std::vector<std::pair<int, int>> idx;
  for (int i = 0; i <= m; ++i) {
    const int j = m - i;
    if (i <= max_i && j <= max_j) idx.emplace_back(i, j);
  }
  return idx;
}

double op_norm(const Mat& a) {
  if (a.rows() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(a);
  return svd.singularValues()(0);
}

}  // namespace

int RMatrixBlock::find(int i, int j) const {
  for (size_t p = 0; p < indices.size(); ++p)
    if (indices[p].first == i && indices[p].second == j) return static_cast<int>(p);
  return -1;
}

std::string RMatrixBlock::dump_json() const {
  nlohmann::json j;
  auto pair = [](cplx v) { return nlohmann::json::array({v.real(), v.imag()}); };
  j["L1"] = pair(L1);
  j["L2"] = pair(L2);
  j["z"] = pair(z);
  j["lambda"] = pair(lambda);
  j["m"] = m;
  j["index_order"] = "pairs (i,j) with i+j=m, ascending i; entries row-major";
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < entries.rows(); ++r)
    for (int c = 0; c < entries.cols(); ++c) rows.push_back(pair(entries(r, c)));
  j["entries"] = rows;
  return j.dump(2);
}

cplx fundamental_alpha(cplx z, cplx lambda, const EllipticParams& ep) {
  return theta(lambda + 2.0 * ep.eta, ep) * theta(z, ep) /
         (theta(lambda, ep) * theta(z - 2.0 * ep.eta, ep));
}

cplx fundamental_beta(cplx z, cplx lambda, const EllipticParams& ep) {
  return -theta(lambda + z, ep) * theta(2.0 * ep.eta, ep) /
         (theta(lambda, ep) * theta(z - 2.0 * ep.eta, ep));
}

Mat fundamental_rmatrix(cplx z, cplx lambda, const EllipticParams& ep) {
  Mat r = Mat::Zero(4, 4);
  r(0, 0) = 1.0;
  r(3, 3) = 1.0;
  r(1, 1) = fundamental_alpha(z, lambda, ep);
  r(1, 2) = fundamental_beta(z, lambda, ep);
  r(2, 1) = fundamental_beta(z, -lambda, ep);
  r(2, 2) = fundamental_alpha(z, -lambda, ep);
  return r;
}

RMatrixBlock fundamental_block(cplx z, cplx lambda, int m, const EllipticParams& ep) {
  RMatrixBlock blk;
  blk.L1 = blk.L2 = 1.0;
  blk.z = z;
  blk.lambda = lambda;
  blk.m = m;
  blk.indices = level_indices(m, 1, 1);
  const int d = blk.dim();
  blk.entries = Mat::Identity(d, d);
  if (m == 1) {
    if (lattice_distance(z - 2.0 * ep.eta, ep.tau) < 1e-9)
      throw std::domain_error("fundamental R-matrix: z-argument at the pole z = 2 eta");
    if (lattice_distance(lambda, ep.tau) < 1e-11)
      throw std::domain_error("fundamental R-matrix: lambda at a lattice pole");
    blk.entries(0, 0) = fundamental_alpha(z, lambda, ep);
    blk.entries(0, 1) = fundamental_beta(z, lambda, ep);
    blk.entries(1, 0) = fundamental_beta(z, -lambda, ep);
    blk.entries(1, 1) = fundamental_alpha(z, -lambda, ep);
  }
  return blk;
}

RMatrixBlock build_rmatrix_at(cplx L1, cplx L2, cplx z1, cplx z2, cplx lambda,
                              int m, const EllipticParams& ep) {
  ModelParams mp{{L1, L2}, {z1, z2}, ep};
  for (int i = 0; i <= m; ++i) {
    const WeightIndex M{{i, m - i}};
    const DiagValue dv = diag_value(M, lambda, mp);
    if (dv.singular)
      throw std::domain_error("build_rmatrix: transition matrix singular at index " +
                              M.str() + ": " + dv.factor);
  }
  auto [A, At] = basis_matrices(m, lambda, mp);
  RMatrixBlock blk;
  blk.L1 = L1;
  blk.L2 = L2;
  blk.z = z1 - z2;
  blk.lambda = lambda;
  blk.m = m;
  blk.indices = level_indices(m, m, m);
  // R A = At  =>  A^T R^T = At^T
  blk.entries = A.transpose().partialPivLu().solve(At.transpose()).transpose();
  return blk;
}

RMatrixBlock build_rmatrix(cplx L1, cplx L2, cplx z, cplx lambda, int m,
                           const EllipticParams& ep) {
  return build_rmatrix_at(L1, L2, z, 0.0, lambda, m, ep);
}

// ----- finite-dimensional quotients -----------------------------------------

namespace {

struct TripleSpace {
  // states (x1, x2, x3) with x1+x2+x3 = m within per-slot caps
  std::vector<std::array<int, 3>> states;
  int find(int a, int b, int c) const {
    for (size_t p = 0; p < states.size(); ++p)
      if (states[p][0] == a && states[p][1] == b && states[p][2] == c)
        return static_cast<int>(p);
    return -1;
  }
};

TripleSpace make_triple(int m, int c1, int c2, int c3) {
  TripleSpace ts;
  for (int a = 0; a <= std::min(m, c1); ++a)
    for (int b = 0; b <= std::min(m - a, c2); ++b) {
      const int c = m - a - b;
      if (c >= 0 && c <= c3) ts.states.push_back({a, b, c});
    }
  return ts;
}

Mat qblock_red(int A, int B, cplx z, cplx lambda, int m, const EllipticParams& ep);

// apply the level block of R^{(slots s1,s2)}; when `shifted` the dynamical
// argument is lambda - 2 eta (Wother - 2 x_other) read off the spectator slot
void apply_pair_red(const TripleSpace& ts, Vec& v, int s1, int s2, int other,
                    int W1, int W2, cplx Wother, bool shifted, cplx z,
                    cplx lambda, const EllipticParams& ep) {
  Vec out = Vec::Zero(v.size());
  std::vector<char> done(ts.states.size(), 0);
  for (size_t p = 0; p < ts.states.size(); ++p) {
    if (done[p]) continue;
    const auto st = ts.states[p];
    const int xo = st[static_cast<size_t>(other)];
    const int lvl = st[static_cast<size_t>(s1)] + st[static_cast<size_t>(s2)];
    // gather the whole (s1,s2) mixing group of this state
    std::vector<int> group;  // positions, keyed by ascending s1-index
    std::vector<int> s1idx;
    for (int i = std::max(0, lvl - W2); i <= std::min(W1, lvl); ++i) {
      int tr[3];
      tr[other] = xo;
      tr[s1] = i;
      tr[s2] = lvl - i;
      const int q = ts.find(tr[0], tr[1], tr[2]);
      if (q >= 0) {
        group.push_back(q);
        s1idx.push_back(i);
        done[static_cast<size_t>(q)] = 1;
      }
    }
    const cplx lam =
        shifted ? lambda - 2.0 * ep.eta * (Wother - 2.0 * static_cast<double>(xo))
                : lambda;
    const Mat blk = qblock_red(W1, W2, z, lam, lvl, ep);
    // blk rows/cols ascending first index over [max(0,lvl-W2), min(W1,lvl)]
    const int base = std::max(0, lvl - W2);
    for (size_t r = 0; r < group.size(); ++r) {
      cplx acc{0.0, 0.0};
      for (size_t c = 0; c < group.size(); ++c)
        acc += blk(s1idx[r] - base, s1idx[c] - base) * v(group[c]);
      out(group[r]) = acc;
    }
  }
  v = out;
}

Mat fundamental_red(cplx z, cplx lambda, int m, const EllipticParams& ep) {
  if (m == 1) {
    Mat r(2, 2);
    r(0, 0) = fundamental_alpha(z, lambda, ep);
    r(0, 1) = fundamental_beta(z, lambda, ep);
    r(1, 0) = fundamental_beta(z, -lambda, ep);
    r(1, 1) = fundamental_alpha(z, -lambda, ep);
    return r;
  }
  return Mat::Identity(1, 1);
}

// level-m block of R_{A,B} on L_A x L_B in the reduced basis E_k = e_k/[k]!,
// indices (i, m-i) ascending i over [max(0,m-B), min(A,m)]
Mat qblock_red(int A, int B, cplx z, cplx lambda, int m, const EllipticParams& ep) {
  const int lo = std::max(0, m - B), hi = std::min(A, m);
  const int d = hi - lo + 1;
  if (d <= 0) return Mat(0, 0);
  if (A == 1 && B == 1) return fundamental_red(z, lambda, m, ep);

  Mat out(d, d);
  if (A == 1) {
    // grow the second slot: spaces (L_1, L_1, L_{B-1})
    const int Bp = B - 1;
    const TripleSpace ts = make_triple(m, 1, 1, Bp);
    for (int cj = 0; cj < d; ++cj) {
      const int i = lo + cj, j = m - i;
      Vec v = Vec::Zero(static_cast<Eigen::Index>(ts.states.size()));
      for (int l = 0; l <= 1; ++l) {
        if (j - l < 0 || j - l > Bp) continue;
        const int q = ts.find(i, l, j - l);
        if (q >= 0) v(q) = 1.0;
      }
      // R^{(13)}(z - eta, lambda), then R^{(12)}(z + eta B', lambda - 2 eta h^{(3)})
      apply_pair_red(ts, v, 0, 2, 1, 1, Bp, 1.0, false, z - ep.eta, lambda, ep);
      apply_pair_red(ts, v, 0, 1, 2, 1, 1, static_cast<double>(Bp), true,
                     z + ep.eta * static_cast<double>(Bp), lambda, ep);
      for (int ri = 0; ri < d; ++ri) {
        const int k = lo + ri, kp = m - k;
        int q = (kp <= Bp) ? ts.find(k, 0, kp) : ts.find(k, 1, kp - 1);
        out(ri, cj) = (q >= 0) ? v(q) : cplx{0.0, 0.0};
      }
    }
  } else {
    // grow the first slot: spaces (L_1, L_{A-1}, L_B)
    const int Ap = A - 1;
    const TripleSpace ts = make_triple(m, 1, Ap, B);
    for (int cj = 0; cj < d; ++cj) {
      const int i = lo + cj, j = m - i;
      Vec v = Vec::Zero(static_cast<Eigen::Index>(ts.states.size()));
      for (int l = 0; l <= 1; ++l) {
        if (i - l < 0 || i - l > Ap) continue;
        const int q = ts.find(l, i - l, j);
        if (q >= 0) v(q) = 1.0;
      }
      // R^{(13)}(z - eta A', lambda - 2 eta h^{(2)}), then R^{(23)}(z + eta, lambda)
      apply_pair_red(ts, v, 0, 2, 1, 1, B, static_cast<double>(Ap), true,
                     z - ep.eta * static_cast<double>(Ap), lambda, ep);
      apply_pair_red(ts, v, 1, 2, 0, Ap, B, 1.0, false, z + ep.eta, lambda, ep);
      for (int ri = 0; ri < d; ++ri) {
        const int k = lo + ri, kp = m - k;
        int q = (k <= Ap) ? ts.find(0, k, kp) : ts.find(1, k - 1, kp);
        out(ri, cj) = (q >= 0) ? v(q) : cplx{0.0, 0.0};
      }
    }
  }
  return out;
}

}  // namespace

RMatrixBlock quotient_rmatrix(int L1, int L2, cplx z, cplx lambda, int m,
                              const EllipticParams& ep) {
  if (L1 < 0 || L2 < 0)
    throw std::invalid_argument("quotient_rmatrix: weights must be non-negative");
  RMatrixBlock blk;
  blk.L1 = L1;
  blk.L2 = L2;
  blk.z = z;
  blk.lambda = lambda;
  blk.m = m;
  blk.indices = level_indices(m, L1, L2);
  const int d = blk.dim();
  blk.entries = Mat(d, d);
  if (d == 0) return blk;
  const Mat red = qblock_red(L1, L2, z, lambda, m, ep);
  // reduced -> standard basis: entry *= [i]! [j]! / ([k]! [l]!)
  std::vector<cplx> fct(static_cast<size_t>(d));
  for (int r = 0; r < d; ++r) {
    const auto [i, j] = blk.indices[static_cast<size_t>(r)];
    fct[static_cast<size_t>(r)] =
        elliptic_factorial(i, ep) * elliptic_factorial(j, ep);
  }
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c)
      blk.entries(r, c) = red(r, c) * fct[static_cast<size_t>(c)] / fct[static_cast<size_t>(r)];
  return blk;
}

RMatrixBlock finite_dim_project(const RMatrixBlock& blk, int L1, int L2,
                                double* leakage) {
  RMatrixBlock out;
  out.L1 = blk.L1;
  out.L2 = blk.L2;
  out.z = blk.z;
  out.lambda = blk.lambda;
  out.m = blk.m;
  std::vector<int> keep, drop;
  for (int p = 0; p < blk.dim(); ++p) {
    const auto [i, j] = blk.indices[static_cast<size_t>(p)];
    if (i <= L1 && j <= L2) {
      keep.push_back(p);
      out.indices.emplace_back(i, j);
    } else {
      drop.push_back(p);
    }
  }
  out.entries = Mat(keep.size(), keep.size());
  for (size_t r = 0; r < keep.size(); ++r)
    for (size_t c = 0; c < keep.size(); ++c)
      out.entries(r, c) = blk.entries(keep[r], keep[c]);
  if (leakage) {
    // the quotient is well defined iff the invariant complement does not feed
    // back into the kept rows
    double lk = 0.0;
    if (!drop.empty() && !keep.empty()) {
      Mat sub(keep.size(), drop.size());
      for (size_t r = 0; r < keep.size(); ++r)
        for (size_t c = 0; c < drop.size(); ++c)
          sub(r, c) = blk.entries(keep[r], drop[c]);
      lk = op_norm(sub);
    }
    *leakage = lk;
  }
  return out;
}

// ----- DYBE ------------------------------------------------------------------

namespace {

Mat chain_pair_block(const ChainWeights& w, int ja, int jb, cplx z, cplx lam,
                     int level, const EllipticParams& ep) {
  if (w.finite) {
    const RMatrixBlock b = quotient_rmatrix(w.int_lambdas[static_cast<size_t>(ja)],
                                            w.int_lambdas[static_cast<size_t>(jb)],
                                            z, lam, level, ep);
    return b.entries;
  }
  const RMatrixBlock b = build_rmatrix(w.lambdas[static_cast<size_t>(ja)],
                                       w.lambdas[static_cast<size_t>(jb)], z, lam,
                                       level, ep);
  return b.entries;
}

int chain_cap(const ChainWeights& w, int slot, int level) {
  return w.finite ? std::min(level, w.int_lambdas[static_cast<size_t>(slot)]) : level;
}

}  // namespace

double dybe_residual(const ChainWeights& w, cplx z, cplx zw, cplx lambda, int m,
                     const EllipticParams& ep) {
  double worst = 0.0;
  for (int lvl = 0; lvl <= m; ++lvl) {
    TripleSpace ts =
        make_triple(lvl, chain_cap(w, 0, lvl), chain_cap(w, 1, lvl), chain_cap(w, 2, lvl));
    const int dim = static_cast<int>(ts.states.size());
    if (dim == 0) continue;
    auto apply = [&](Vec& v, int s1, int s2, int other, cplx zz, bool shifted) {
      Vec out = Vec::Zero(dim);
      for (int p = 0; p < dim; ++p) {
        const auto st = ts.states[static_cast<size_t>(p)];
        const int xo = st[static_cast<size_t>(other)];
        const int plvl = st[static_cast<size_t>(s1)] + st[static_cast<size_t>(s2)];
        const cplx lam =
            shifted ? lambda - 2.0 * ep.eta *
                                   (w.lambdas[static_cast<size_t>(other)] -
                                    2.0 * static_cast<double>(xo))
                    : lambda;
        const Mat blk = chain_pair_block(w, s1, s2, zz, lam, plvl, ep);
        const int base = std::max(0, plvl - chain_cap(w, s2, plvl));
        cplx acc{0.0, 0.0};
        for (int i = std::max(0, plvl - chain_cap(w, s2, plvl));
             i <= std::min(chain_cap(w, s1, plvl), plvl); ++i) {
          int tr[3];
          tr[other] = xo;
          tr[s1] = i;
          tr[s2] = plvl - i;
          const int q = ts.find(tr[0], tr[1], tr[2]);
          if (q >= 0)
            acc += blk(st[static_cast<size_t>(s1)] - base, i - base) * v(q);
        }
        out(p) = acc;
      }
      v = out;
    };
    Mat lhs(dim, dim), rhs(dim, dim);
    for (int c = 0; c < dim; ++c) {
      Vec v = Vec::Zero(dim);
      v(c) = 1.0;
      // R12(z, l-2eta h3) R13(z+w, l) R23(w, l-2eta h1)
      apply(v, 1, 2, 0, zw, true);
      apply(v, 0, 2, 1, z + zw, false);
      apply(v, 0, 1, 2, z, true);
      lhs.col(c) = v;
      v = Vec::Zero(dim);
      v(c) = 1.0;
      // R23(w, l) R13(z+w, l-2eta h2) R12(z, l)
      apply(v, 0, 1, 2, z, false);
      apply(v, 0, 2, 1, z + zw, true);
      apply(v, 1, 2, 0, zw, false);
      rhs.col(c) = v;
    }
    worst = std::max(worst, op_norm(lhs - rhs) / std::max(1.0, op_norm(lhs)));
  }
  return worst;
}

double unitarity_residual(cplx L1, cplx L2, cplx z, cplx lambda, int m,
                          const EllipticParams& ep, bool finite) {
  RMatrixBlock r12, r21;
  if (finite) {
    r12 = quotient_rmatrix(static_cast<int>(L1.real()), static_cast<int>(L2.real()),
                           z, lambda, m, ep);
    r21 = quotient_rmatrix(static_cast<int>(L2.real()), static_cast<int>(L1.real()),
                           -z, lambda, m, ep);
  } else {
    r12 = build_rmatrix(L1, L2, z, lambda, m, ep);
    r21 = build_rmatrix(L2, L1, -z, lambda, m, ep);
  }
  const int d = r12.dim();
  Mat flipped(d, d);  // (R21)^{(kl),(ij)} = R21^{(lk),(ji)}
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) {
      const auto [k, l] = r12.indices[static_cast<size_t>(r)];
      const auto [i, j] = r12.indices[static_cast<size_t>(c)];
      flipped(r, c) = r21.entries(r21.find(l, k), r21.find(j, i));
    }
  return op_norm(r12.entries * flipped - Mat::Identity(d, d));
}

// ----- Shapovalov ------------------------------------------------------------

cplx shapovalov_q(int k, cplx Lambda, cplx lambda, const EllipticParams& ep) {
  const cplx pref = theta_d0(ep) / theta(2.0 * ep.eta, ep);
  cplx out{1.0, 0.0};
  for (int l = 1; l <= k; ++l) {
    out *= pref * theta(2.0 * ep.eta * (Lambda + 1.0 - static_cast<double>(l)), ep) *
           theta(2.0 * ep.eta * static_cast<double>(l), ep) /
           (theta(lambda + 2.0 * ep.eta * (Lambda + 1.0 - static_cast<double>(k) -
                                           static_cast<double>(l)),
                  ep) *
            theta(lambda - 2.0 * ep.eta * static_cast<double>(l), ep));
  }
  return out;
}

cplx shapovalov_qm(const WeightIndex& M, const std::vector<cplx>& lambdas,
                   cplx lambda, const EllipticParams& ep) {
  cplx out{1.0, 0.0};
  cplx shift{0.0, 0.0};
  for (int j = 0; j < M.n(); ++j) {
    out *= shapovalov_q(M[j], lambdas[static_cast<size_t>(j)], lambda + 2.0 * ep.eta * shift, ep);
    shift += lambdas[static_cast<size_t>(j)] - 2.0 * static_cast<double>(M[j]);
  }
  return out;
}

std::vector<ShapovalovPole> shapovalov_poles(const WeightIndex& M,
                                             const std::vector<cplx>& lambdas,
                                             const EllipticParams& ep) {
  const int n = M.n();
  std::vector<ShapovalovPole> out;
  cplx prefix{0.0, 0.0};
  for (int j = 1; j < n; ++j) {
    const int mj = M[j - 1], mj1 = M[j];
    for (int l = 0; l <= mj + mj1; ++l) {
      if (l == mj) continue;
      ShapovalovPole p;
      p.j = j;
      p.l = l;
      p.lambda0 = -2.0 * ep.eta *
                  (lambdas[static_cast<size_t>(j - 1)] - static_cast<double>(mj) -
                   static_cast<double>(l) + prefix);
      std::vector<int> dual(M.parts);
      dual[static_cast<size_t>(j - 1)] = l;
      dual[static_cast<size_t>(j)] = mj + mj1 - l;
      p.dual = WeightIndex{dual};
      out.push_back(std::move(p));
    }
    prefix += lambdas[static_cast<size_t>(j - 1)] - 2.0 * static_cast<double>(M[j - 1]);
  }
  const int mn = M[n - 1], m1 = M[0];
  for (int l = 0; l <= mn + m1; ++l) {
    if (l == mn) continue;
    ShapovalovPole p;
    p.j = n;
    p.l = l;
    p.lambda0 = -2.0 * ep.eta * static_cast<double>(mn - l);
    std::vector<int> dual(M.parts);
    dual[0] = m1 + mn - l;
    dual[static_cast<size_t>(n - 1)] = l;
    p.dual = WeightIndex{dual};
    out.push_back(std::move(p));
  }
  return out;
}

ShapovalovDiag shapovalov(const std::vector<cplx>& lambdas, int m, cplx lambda,
                          const EllipticParams& ep) {
  cplx total{0.0, 0.0};
  for (const cplx& l : lambdas) total += l;
  if (std::abs(total - 2.0 * static_cast<double>(m)) > 1e-9)
    throw std::invalid_argument("shapovalov: weights must sum to 2m");
  ShapovalovDiag out;
  const int n = static_cast<int>(lambdas.size());
  std::vector<int> parts(static_cast<size_t>(n), 0);
  auto rec = [&](auto&& self, int pos, int left) -> void {
    if (pos == n - 1) {
      parts[static_cast<size_t>(pos)] = left;
      WeightIndex M{parts};
      out.coefficients.push_back(shapovalov_qm(M, lambdas, lambda, ep));
      out.poles.push_back(shapovalov_poles(M, lambdas, ep));
      out.indices.push_back(std::move(M));
      return;
    }
    for (int v = 0; v <= left; ++v) {
      parts[static_cast<size_t>(pos)] = v;
      self(self, pos + 1, left - v);
    }
  };
  rec(rec, 0, m);
  return out;
}

double qr_relation_residual(int j, int k, int r, int s, cplx lambda, cplx L1,
                            cplx L2, cplx z, const EllipticParams& ep) {
  const int m = j + k;
  if (r + s != m) throw std::invalid_argument("qr_relation: need j+k == r+s");
  const RMatrixBlock bl = build_rmatrix(L1, L2, z, -lambda, m, ep);
  const cplx shift = lambda + 2.0 * ep.eta * (L1 + L2 - 2.0 * static_cast<double>(r + s));
  const RMatrixBlock br = build_rmatrix(L1, L2, z, shift, m, ep);
  const cplx lhs = shapovalov_q(j, L1, lambda + 2.0 * ep.eta * (L2 - 2.0 * static_cast<double>(k)), ep) *
                   shapovalov_q(k, L2, lambda, ep) *
                   bl.entries(bl.find(j, k), bl.find(r, s));
  const cplx rhs = shapovalov_q(r, L1, lambda, ep) *
                   shapovalov_q(s, L2, lambda + 2.0 * ep.eta * (L1 - 2.0 * static_cast<double>(r)), ep) *
                   br.entries(br.find(r, s), br.find(j, k));
  return std::abs(lhs - rhs);
}

// ----- lambda-poles ----------------------------------------------------------

Mat rmatrix_laurent(cplx L1, cplx L2, cplx z, cplx pole0, int m, int order,
                    const EllipticParams& ep, double radius, int points) {
  Mat acc;
  for (int k = 0; k < points; ++k) {
    const double th = 2.0 * kPi * static_cast<double>(k) / points;
    const cplx w = std::polar(1.0, th);
    const RMatrixBlock blk =
        build_rmatrix(L1, L2, z, pole0 + radius * w, m, ep);
    const cplx f = std::pow(radius * w, order) / static_cast<double>(points);
    if (acc.size() == 0) acc = Mat::Zero(blk.dim(), blk.dim());
    acc += f * blk.entries;
  }
  return acc;
}

double residue_kernel_residual(cplx L1, cplx L2, cplx z, int k, int r, int s,
                               int m, const EllipticParams& ep) {
  const cplx pole0 = 2.0 * ep.eta * (L1 - static_cast<double>(k)) +
                     static_cast<double>(r) + static_cast<double>(s) * ep.tau;
  const Mat K = rmatrix_laurent(L1, L2, z, pole0, m, 1, ep);
  const double kn = std::max(op_norm(K), 1e-30);
  const cplx phase_base = -z + ep.eta * L1 + ep.eta * L2;
  // relation-constrained vector on the affected diagonal a + b = k
  Vec v = Vec::Zero(m + 1);
  std::vector<char> affected(static_cast<size_t>(m + 1), 0);
  for (int a = std::max(0, k - m); a <= std::min(m, k); ++a) {
    affected[static_cast<size_t>(a)] = 1;
    const cplx w = elliptic_factorial(a, ep) * elliptic_factorial(m - a, ep) *
                   std::exp(2.0 * kPi * kI * static_cast<double>(s) *
                            static_cast<double>(a) * phase_base);
    v(a) = 1.0 / w;
  }
  double worst = op_norm(K * v) / (kn * std::max(1e-30, v.norm()));
  for (int a = 0; a <= m; ++a) {
    if (affected[static_cast<size_t>(a)]) continue;
    Vec u = Vec::Zero(m + 1);
    u(a) = 1.0;
    worst = std::max(worst, op_norm(K * u) / kn);
  }
  return worst;
}

cplx inv_elliptic_factorial(int j, const EllipticParams& ep) {
  if (j < 0) return {0.0, 0.0};
  return 1.0 / elliptic_factorial(j, ep);
}

namespace {

cplx entry_or_zero(const RMatrixBlock& blk, int k, int l, int i, int j) {
  if (k < 0 || l < 0 || i < 0 || j < 0) return {0.0, 0.0};
  const int r = blk.find(k, l), c = blk.find(i, j);
  if (r < 0 || c < 0) return {0.0, 0.0};
  return blk.entries(r, c);
}

// The transition matrix can degenerate at special lambda (a diagonal factor
// of the Lambda1+Lambda2 family vanishes) while the R-matrix itself stays
// finite there. Recover the value by a Cauchy mean on a small circle.
RMatrixBlock build_rmatrix_robust(cplx L1, cplx L2, cplx z, cplx lambda, int m,
                                  const EllipticParams& ep) {
  try {
    return build_rmatrix(L1, L2, z, lambda, m, ep);
  } catch (const std::domain_error&) {
    RMatrixBlock blk;
    blk.L1 = L1;
    blk.L2 = L2;
    blk.z = z;
    blk.lambda = lambda;
    blk.m = m;
    blk.indices.clear();
    for (int i = 0; i <= m; ++i) blk.indices.emplace_back(i, m - i);
    blk.entries = rmatrix_laurent(L1, L2, z, lambda, m, 0, ep, 2.5e-4);
    return blk;
  }
}

}  // namespace

double coeff_relation_residual(int kind, int a, int b, int bp_or_ap, int c_or_d,
                               int r, int s, cplx z, cplx w, cplx L1, cplx L2,
                               const EllipticParams& ep) {
  const cplx rs = static_cast<double>(r) + static_cast<double>(s) * ep.tau;
  const cplx two_pi_i_s = 2.0 * kPi * kI * static_cast<double>(s);
  if (kind == 1) {
    const int bp = bp_or_ap, c = c_or_d;
    const int d = a + b - c, dp = a + bp - c;
    const int lvl_l = a + b, lvl_r = a + bp;
    cplx lhs{0.0, 0.0}, rhs{0.0, 0.0};
    if (lvl_l >= 0) {
      const RMatrixBlock Bl = build_rmatrix_robust(
          L1, L2, z - w, 2.0 * ep.eta * static_cast<double>(bp - b) + rs, lvl_l, ep);
      lhs = std::exp(two_pi_i_s * (static_cast<double>(b) * (-w + ep.eta * L1) +
                                   static_cast<double>(d) * (z - ep.eta * L2))) *
            elliptic_factorial(b, ep) * inv_elliptic_factorial(d, ep) *
            entry_or_zero(Bl, a, b, d, c);
    }
    if (lvl_r >= 0) {
      const RMatrixBlock Br = build_rmatrix_robust(
          L1, L2, z - w, 2.0 * ep.eta * static_cast<double>(b - bp) + rs, lvl_r, ep);
      rhs = std::exp(two_pi_i_s * (static_cast<double>(bp) * (-w + ep.eta * L1) +
                                   static_cast<double>(dp) * (z - ep.eta * L2))) *
            elliptic_factorial(bp, ep) * inv_elliptic_factorial(dp, ep) *
            entry_or_zero(Br, a, bp, dp, c);
    }
    return std::abs(lhs - rhs);
  }
  const int ap = bp_or_ap, d = c_or_d;
  const int c = a + b - d, cp = ap + b - d;
  const cplx lam =
      2.0 * ep.eta * (L1 + L2 - 2.0 * static_cast<double>(b) - static_cast<double>(a + ap)) + rs;
  const RMatrixBlock Bl = build_rmatrix_robust(L1, L2, z - w, lam, a + b, ep);
  const RMatrixBlock Br =
      (ap + b == a + b) ? Bl : build_rmatrix_robust(L1, L2, z - w, lam, ap + b, ep);
  const cplx lhs = std::exp(two_pi_i_s * (static_cast<double>(a) * (-z - ep.eta * L2) +
                                          static_cast<double>(c) * (w + ep.eta * L1))) *
                   elliptic_factorial(a, ep) * inv_elliptic_factorial(c, ep) *
                   entry_or_zero(Bl, a, b, d, c);
  const cplx rhs = std::exp(two_pi_i_s * (static_cast<double>(ap) * (-z - ep.eta * L2) +
                                          static_cast<double>(cp) * (w + ep.eta * L1))) *
                   elliptic_factorial(ap, ep) * inv_elliptic_factorial(cp, ep) *
                   entry_or_zero(Br, ap, b, d, cp);
  return std::abs(lhs - rhs);
}

}  // namespace elab
