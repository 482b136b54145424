#include "elab/weights.hpp"

#include <numeric>
#include <sstream>

namespace elab {

int WeightIndex::total() const {
  return std::accumulate(parts.begin(), parts.end(), 0);
}

bool WeightIndex::admissible(std::span<const int> lambdas) const {
  for (size_t j = 0; j < parts.size(); ++j)
    if (parts[j] < 0 || parts[j] > lambdas[j]) return false;
  return true;
}

std::string WeightIndex::str() const {
  std::ostringstream os;
  os << '(';
  for (size_t j = 0; j < parts.size(); ++j) os << (j ? "," : "") << parts[j];
  os << ')';
  return os.str();
}

std::vector<cplx> special_point(const WeightIndex& M, const ModelParams& mp) {
  std::vector<cplx> t;
  t.reserve(static_cast<size_t>(M.total()));
  for (int j = 0; j < M.n(); ++j)
    for (int s = M[j] - 1; s >= 0; --s)
      t.push_back(mp.z[static_cast<size_t>(j)] - mp.a(j) +
                  2.0 * mp.ell.eta * static_cast<double>(s));
  return t;
}

namespace {

// Ordered set partitions of {0..m-1} with block sizes M, emitted in the
// lexicographic order of the block-assignment word.
template <class F>
void for_each_assignment(const WeightIndex& M, F&& visit) {
  const int m = M.total();
  const int n = M.n();
  std::vector<int> remaining(M.parts.begin(), M.parts.end());
  std::vector<int> blk(static_cast<size_t>(m), -1);
  auto rec = [&](auto&& self, int pos) -> void {
    if (pos == m) {
      visit(std::span<const int>(blk));
      return;
    }
    for (int b = 0; b < n; ++b) {
      if (remaining[static_cast<size_t>(b)] == 0) continue;
      --remaining[static_cast<size_t>(b)];
      blk[static_cast<size_t>(pos)] = b;
      self(self, pos + 1);
      ++remaining[static_cast<size_t>(b)];
    }
  };
  rec(rec, 0);
}

struct WfTables {
  int m, n;
  // zfac[i][k] = theta(t_i - z_k + a_k)/theta(t_i - z_k - a_k)
  std::vector<std::vector<cplx>> zfac;
  // lam[i][k] = theta(lambda + t_i - z_k - a_k + shift_k)/theta(t_i - z_k - a_k)
  std::vector<std::vector<cplx>> lam;
  // tnum[i][j] = theta(t_i - t_j + 2 eta), tden[i][j] = theta(t_i - t_j)
  std::vector<std::vector<cplx>> tnum, tden;
  cplx u_inv;
};

WfTables make_tables(const WeightIndex& M, std::span<const cplx> t, cplx lambda,
                     const ModelParams& mp, bool mirror) {
  const auto& ep = mp.ell;
  WfTables tb;
  tb.m = M.total();
  tb.n = M.n();
  const int m = tb.m, n = tb.n;

  // dynamical shifts per factor k: 2 eta m_k - 2 eta sum_{l<k}(Lambda_l - 2 m_l)
  // (suffix sum for the mirror variant)
  std::vector<cplx> shift(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) {
    cplx acc{0.0, 0.0};
    if (!mirror)
      for (int l = 0; l < k; ++l)
        acc += mp.lambdas[static_cast<size_t>(l)] - 2.0 * static_cast<double>(M[l]);
    else
      for (int l = k + 1; l < n; ++l)
        acc += mp.lambdas[static_cast<size_t>(l)] - 2.0 * static_cast<double>(M[l]);
    shift[static_cast<size_t>(k)] =
        2.0 * ep.eta * static_cast<double>(M[k]) - 2.0 * ep.eta * acc;
  }

  tb.zfac.assign(static_cast<size_t>(m), std::vector<cplx>(static_cast<size_t>(n)));
  tb.lam.assign(static_cast<size_t>(m), std::vector<cplx>(static_cast<size_t>(n)));
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < n; ++k) {
      const cplx den = theta(t[static_cast<size_t>(i)] - mp.z[static_cast<size_t>(k)] - mp.a(k), ep);
      tb.zfac[static_cast<size_t>(i)][static_cast<size_t>(k)] =
          theta(t[static_cast<size_t>(i)] - mp.z[static_cast<size_t>(k)] + mp.a(k), ep) / den;
      tb.lam[static_cast<size_t>(i)][static_cast<size_t>(k)] =
          theta(lambda + t[static_cast<size_t>(i)] - mp.z[static_cast<size_t>(k)] - mp.a(k) +
                    shift[static_cast<size_t>(k)],
                ep) /
          den;
    }

  tb.tnum.assign(static_cast<size_t>(m), std::vector<cplx>(static_cast<size_t>(m)));
  tb.tden.assign(static_cast<size_t>(m), std::vector<cplx>(static_cast<size_t>(m)));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      const cplx d = t[static_cast<size_t>(i)] - t[static_cast<size_t>(j)];
      tb.tnum[static_cast<size_t>(i)][static_cast<size_t>(j)] = theta(d + 2.0 * ep.eta, ep);
      tb.tden[static_cast<size_t>(i)][static_cast<size_t>(j)] = theta(d, ep);
    }

  cplx u_inv{1.0, 0.0};
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      u_inv *= tb.tden[static_cast<size_t>(i)][static_cast<size_t>(j)] /
               tb.tnum[static_cast<size_t>(i)][static_cast<size_t>(j)];
  tb.u_inv = u_inv;
  return tb;
}

constexpr int kMaxLevel = 5;  // multinomial cost cap

cplx weight_fn_impl(const WeightIndex& M, std::span<const cplx> t, cplx lambda,
                    const ModelParams& mp, bool mirror) {
  const int m = M.total();
  if (static_cast<int>(t.size()) != m)
    throw std::invalid_argument("weight_fn: t has wrong length");
  if (m > kMaxLevel)
    throw std::invalid_argument("weight_fn: level " + std::to_string(m) +
                                " exceeds the combinatorial cap " +
                                std::to_string(kMaxLevel));
  if (m == 0) return {1.0, 0.0};
  const WfTables tb = make_tables(M, t, lambda, mp, mirror);
  const int n = M.n();

  cplx sum{0.0, 0.0};
  for_each_assignment(M, [&](std::span<const int> blk) {
    cplx term{1.0, 0.0};
    for (int i = 0; i < m; ++i) {
      const int l = blk[static_cast<size_t>(i)];
      if (!mirror) {
        for (int k = 0; k < l; ++k)
          term *= tb.zfac[static_cast<size_t>(i)][static_cast<size_t>(k)];
      } else {
        for (int k = l + 1; k < n; ++k)
          term *= tb.zfac[static_cast<size_t>(i)][static_cast<size_t>(k)];
      }
      term *= tb.lam[static_cast<size_t>(i)][static_cast<size_t>(l)];
    }
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        if (i == j) continue;
        const bool ordered = !mirror
                                 ? blk[static_cast<size_t>(i)] < blk[static_cast<size_t>(j)]
                                 : blk[static_cast<size_t>(i)] > blk[static_cast<size_t>(j)];
        if (ordered)
          term *= tb.tnum[static_cast<size_t>(i)][static_cast<size_t>(j)] /
                  tb.tden[static_cast<size_t>(i)][static_cast<size_t>(j)];
      }
    sum += term;
  });
  return tb.u_inv * sum;
}

}  // namespace

cplx weight_fn(const WeightIndex& M, std::span<const cplx> t, cplx lambda,
               const ModelParams& mp) {
  return weight_fn_impl(M, t, lambda, mp, false);
}

cplx mirror_weight_fn(const WeightIndex& M, std::span<const cplx> t, cplx lambda,
                      const ModelParams& mp) {
  return weight_fn_impl(M, t, lambda, mp, true);
}

namespace {

DiagValue diag_impl(const WeightIndex& M, cplx lambda, const ModelParams& mp,
                    bool mirror) {
  const auto& ep = mp.ell;
  const cplx eta = ep.eta;
  const cplx L1 = mp.lambdas[0], L2 = mp.lambdas[1];
  const cplx z12 = mp.z[0] - mp.z[1];
  const int m1 = M[0], m2 = M[1];
  DiagValue out{cplx{1.0, 0.0}, false, {}};

  auto mul = [&](cplx num, cplx den, const char* what) {
    if (std::abs(den) < 1e-13) {
      out.singular = true;
      out.factor = std::string("denominator ") + what + " vanishes";
    }
    if (std::abs(num) < 1e-13 && !out.singular) {
      out.singular = true;
      out.factor = std::string("numerator factor vanishes (") + what + " ladder)";
    }
    out.value *= num / den;
  };

  // Products of the distinguished summand at T_M. The lambda-ladders and
  // denominators follow the printed closed forms; the z-ratio numerators are
  // the values theta(t - z_k +- a_k) actually produced by the ladder points,
  // and the mirror variant keeps the cross-block factors
  // theta(t_p - t_q - 2 eta)/theta(t_p - t_q + 2 eta), which cancel only in
  // the ordinary ordering.
  if (!mirror) {
    for (int l = 1; l <= m1; ++l) {
      mul(theta(2.0 * eta, ep), theta(2.0 * eta * static_cast<double>(l), ep), "[l]");
      mul(theta(lambda - 2.0 * eta * (L1 - static_cast<double>(m1) - static_cast<double>(l) + 1.0), ep),
          theta(-2.0 * eta * (L1 - static_cast<double>(l) + 1.0), ep),
          "theta(-2eta(L1-l+1))");
    }
    for (int l = 1; l <= m2; ++l) {
      mul(theta(2.0 * eta, ep), theta(2.0 * eta * static_cast<double>(l), ep), "[l]");
      mul(theta(lambda - 2.0 * eta * (L1 + L2 - 2.0 * m1 - static_cast<double>(m2) - static_cast<double>(l) + 1.0), ep),
          theta(-2.0 * eta * (L2 - static_cast<double>(l) + 1.0), ep),
          "theta(-2eta(L2-l+1))");
      mul(theta(-z12 + eta * L1 - eta * L2 + 2.0 * eta * static_cast<double>(l - 1), ep),
          theta(-z12 - eta * L1 - eta * L2 + 2.0 * eta * static_cast<double>(l - 1), ep),
          "z-ratio");
    }
  } else {
    for (int l = 1; l <= m2; ++l) {
      mul(theta(2.0 * eta, ep), theta(2.0 * eta * static_cast<double>(l), ep), "[l]");
      mul(theta(lambda - 2.0 * eta * (L2 - static_cast<double>(m2) - static_cast<double>(l) + 1.0), ep),
          theta(-2.0 * eta * (L2 - static_cast<double>(l) + 1.0), ep),
          "theta(-2eta(L2-l+1))");
    }
    for (int l = 1; l <= m1; ++l) {
      mul(theta(2.0 * eta, ep), theta(2.0 * eta * static_cast<double>(l), ep), "[l]");
      mul(theta(lambda - 2.0 * eta * (L1 + L2 - static_cast<double>(m1) - 2.0 * m2 - static_cast<double>(l) + 1.0), ep),
          theta(-2.0 * eta * (L1 - static_cast<double>(l) + 1.0), ep),
          "theta(-2eta(L1-l+1))");
      mul(theta(z12 - eta * L1 + eta * L2 + 2.0 * eta * static_cast<double>(l - 1), ep),
          theta(z12 - eta * L1 - eta * L2 + 2.0 * eta * static_cast<double>(l - 1), ep),
          "z-ratio");
    }
    const cplx D = z12 - eta * L1 + eta * L2;
    for (int s = 0; s < m1; ++s)
      for (int sp = 0; sp < m2; ++sp)
        mul(theta(D + 2.0 * eta * static_cast<double>(s - sp - 1), ep),
            theta(D + 2.0 * eta * static_cast<double>(s - sp + 1), ep), "cross");
  }
  return out;
}

}  // namespace

DiagValue diag_value(const WeightIndex& M, cplx lambda, const ModelParams& mp) {
  return diag_impl(M, lambda, mp, false);
}

DiagValue diag_value_mirror(const WeightIndex& M, cplx lambda, const ModelParams& mp) {
  return diag_impl(M, lambda, mp, true);
}

std::pair<Mat, Mat> basis_matrices(int m, cplx lambda, const ModelParams& mp, Exec exec) {
  if (mp.n() != 2) throw std::invalid_argument("basis_matrices: n must be 2");
  const int d = m + 1;
  Mat A(d, d), At(d, d);
  std::vector<std::vector<cplx>> pts(static_cast<size_t>(d));
  for (int c = 0; c < d; ++c)
    pts[static_cast<size_t>(c)] = special_point(WeightIndex{{c, m - c}}, mp);
  parallel_for(
      static_cast<std::ptrdiff_t>(d) * d,
      [&](std::ptrdiff_t idx) {
        const int r = static_cast<int>(idx / d), c = static_cast<int>(idx % d);
        const WeightIndex M{{r, m - r}};
        A(r, c) = weight_fn(M, pts[static_cast<size_t>(c)], lambda, mp);
        At(r, c) = mirror_weight_fn(M, pts[static_cast<size_t>(c)], lambda, mp);
      },
      exec);
  return {A, At};
}

double weight_resonance_residual(int j, int a, int b, const WeightIndex& M,
                                 const WeightIndex& L, int r, int s,
                                 std::span<const cplx> t, const ModelParams& mp) {
  const auto& ep = mp.ell;
  const int n = M.n();
  if (j < 1 || j >= n) throw std::invalid_argument("resonance: need 1 <= j <= n-1");
  const int k = M[j - 1] + M[j];
  if (M[j - 1] != a || L[j - 1] != b || L[j - 1] + L[j] != k)
    throw std::invalid_argument("resonance: indices inconsistent with (j,a,b)");
  cplx pref{0.0, 0.0};
  for (int l = 0; l < j - 1; ++l)
    pref += mp.lambdas[static_cast<size_t>(l)] - 2.0 * static_cast<double>(M[l]);
  const cplx lam0 = static_cast<double>(r) + static_cast<double>(s) * ep.tau +
                    2.0 * ep.eta * (mp.lambdas[static_cast<size_t>(j - 1)] -
                                    static_cast<double>(a + b) + pref);
  const cplx base = mp.z[static_cast<size_t>(j)] - mp.z[static_cast<size_t>(j - 1)] +
                    ep.eta * mp.lambdas[static_cast<size_t>(j)] +
                    ep.eta * mp.lambdas[static_cast<size_t>(j - 1)];
  const cplx pha = std::exp(2.0 * kPi * kI * static_cast<double>(s) * static_cast<double>(a) * base);
  const cplx phb = std::exp(2.0 * kPi * kI * static_cast<double>(s) * static_cast<double>(b) * base);
  const cplx lhs = elliptic_factorial(a, ep) * elliptic_factorial(k - a, ep) * pha *
                   weight_fn(M, t, lam0, mp);
  const cplx rhs = elliptic_factorial(b, ep) * elliptic_factorial(k - b, ep) * phb *
                   weight_fn(L, t, lam0, mp);
  return std::abs(lhs - rhs);
}

cplx sm_twisted_apply(const WeightIndex& M, std::span<const cplx> t, cplx lambda,
                      const ModelParams& mp, int j, bool mirror) {
  std::vector<cplx> ts(t.begin(), t.end());
  std::swap(ts[static_cast<size_t>(j)], ts[static_cast<size_t>(j + 1)]);
  const cplx ratio =
      theta(t[static_cast<size_t>(j)] - t[static_cast<size_t>(j + 1)] - 2.0 * mp.ell.eta, mp.ell) /
      theta(t[static_cast<size_t>(j)] - t[static_cast<size_t>(j + 1)] + 2.0 * mp.ell.eta, mp.ell);
  const cplx v = mirror ? mirror_weight_fn(M, ts, lambda, mp) : weight_fn(M, ts, lambda, mp);
  return v * ratio;
}

}  // namespace elab
