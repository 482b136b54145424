#include "elab/irf.hpp"

#include <Eigen/Eigenvalues>
#include <json.hpp>
#include <sstream>

namespace elab {

std::string IrfState::str() const {
  std::ostringstream os;
  os << '|';
  for (size_t j = 0; j < heights.size(); ++j) os << (j ? "," : "") << heights[j];
  os << '>';
  return os.str();
}

cplx boltzmann(int a, int b, int c, int d, cplx mu, cplx z, const EllipticParams& ep) {
  auto adj = [](int x, int y) { return x - y == 1 || y - x == 1; };
  if (!adj(a, b) || !adj(b, c) || !adj(c, d) || !adj(a, d)) return {0.0, 0.0};
  const bool at_integer = std::abs(mu) < 1e-14;
  const cplx hd = mu + static_cast<double>(d);
  const cplx lam = 2.0 * ep.eta * hd;
  if (b == d + 2 || b == d - 2) return {1.0, 0.0};
  // b == d: the two-string faces
  if (at_integer && d == 0)
    throw std::domain_error("boltzmann: height d = 0 puts the R-entry at a pole");
  const cplx den = theta(lam, ep) * theta(z - 2.0 * ep.eta, ep);
  if (c == d + 1) {
    if (a == d + 1)  // beta(z, lam)
      return -theta(lam + z, ep) * theta(2.0 * ep.eta, ep) / den;
    // alpha(z, -lam); numerator theta(2 eta (1 - d - mu)) vanishes exactly at d = 1
    if (at_integer && d == 1) return {0.0, 0.0};
    return theta(-lam + 2.0 * ep.eta, ep) * theta(z, ep) /
           (theta(-lam, ep) * theta(z - 2.0 * ep.eta, ep));
  }
  // c == d - 1
  if (a == d + 1) {
    if (at_integer && d == -1) return {0.0, 0.0};  // alpha(z, lam) numerator zero
    return theta(lam + 2.0 * ep.eta, ep) * theta(z, ep) / den;
  }
  return -theta(-lam + z, ep) * theta(2.0 * ep.eta, ep) /
         (theta(-lam, ep) * theta(z - 2.0 * ep.eta, ep));
}

double star_triangle_residual(int a, int b, int c, int d, int e, int f, cplx mu,
                              cplx z1, cplx z2, cplx z3, const EllipticParams& ep,
                              int restricted_N) {
  int glo = std::min({a, b, c, d, e, f}) - 1;
  int ghi = std::max({a, b, c, d, e, f}) + 1;
  if (restricted_N > 0) {
    glo = std::max(glo, 1);
    ghi = std::min(ghi, restricted_N - 1);
  }
  cplx lhs{0.0, 0.0}, rhs{0.0, 0.0};
  for (int g = glo; g <= ghi; ++g) {
    lhs += boltzmann(a, b, g, f, mu, z2 - z3, ep) *
           boltzmann(b, c, d, g, mu, z1 - z3, ep) *
           boltzmann(g, d, e, f, mu, z1 - z2, ep);
    rhs += boltzmann(b, c, g, a, mu, z1 - z2, ep) *
           boltzmann(a, g, e, f, mu, z1 - z3, ep) *
           boltzmann(g, c, d, e, mu, z2 - z3, ep);
  }
  return std::abs(lhs - rhs);
}

std::vector<IrfState> restricted_basis(int N, int n) {
  if (n % 2 != 0) throw std::invalid_argument("restricted_basis: n must be even");
  std::vector<IrfState> out;
  std::vector<int> h(static_cast<size_t>(n));
  auto rec = [&](auto&& self, int pos) -> void {
    if (pos == n) {
      if (std::abs(h[static_cast<size_t>(n - 1)] - h[0]) == 1) out.push_back({h});
      return;
    }
    for (int step : {-1, 1}) {
      const int v = h[static_cast<size_t>(pos - 1)] + step;
      if (v < 1 || v > N - 1) continue;
      h[static_cast<size_t>(pos)] = v;
      self(self, pos + 1);
    }
  };
  for (int first = 1; first <= N - 1; ++first) {
    h[0] = first;
    rec(rec, 1);
  }
  std::sort(out.begin(), out.end());
  return out;
}

long walk_count(int N, int n) {
  const int d = N - 1;
  Mat adj = Mat::Zero(d, d);
  for (int i = 0; i + 1 < d; ++i) {
    adj(i, i + 1) = 1.0;
    adj(i + 1, i) = 1.0;
  }
  Mat p = Mat::Identity(d, d);
  for (int k = 0; k < n; ++k) p = p * adj;
  return std::lround(p.trace().real());
}

CoeffMap transfer_apply(const CoeffMap& v, cplx w, std::span<const cplx> z,
                        cplx mu, const EllipticParams& ep, bool positive_only,
                        int restricted_N) {
  CoeffMap out;
  for (const auto& [a, va] : v) {
    const int n = static_cast<int>(a.heights.size());
    // enumerate adjacent output rows b, b_j in {a_j - 1, a_j + 1}
    std::vector<int> b(static_cast<size_t>(n));
    auto rec = [&](auto&& self, int pos) -> void {
      if (pos == n) {
        cplx prod{1.0, 0.0};
        for (int j = 0; j < n; ++j) {
          const int jn = (j + 1) % n;
          prod *= boltzmann(b[static_cast<size_t>(jn)], a.heights[static_cast<size_t>(jn)],
                            a.heights[static_cast<size_t>(j)], b[static_cast<size_t>(j)], mu,
                            w - z[static_cast<size_t>(j)], ep);
          if (prod == cplx{0.0, 0.0}) return;
        }
        out[IrfState{b}] += prod * va;
        return;
      }
      for (int step : {-1, 1}) {
        const int h = a.heights[static_cast<size_t>(pos)] + step;
        if (positive_only && h < 1) continue;
        if (restricted_N > 0 && (h < 1 || h > restricted_N - 1)) continue;
        b[static_cast<size_t>(pos)] = h;
        self(self, pos + 1);
      }
    };
    rec(rec, 0);
  }
  return out;
}

Mat restricted_transfer_matrix(int N, int n, cplx w, std::span<const cplx> z,
                               const EllipticParams& ep, Exec exec) {
  const auto basis = restricted_basis(N, n);
  const int d = static_cast<int>(basis.size());
  auto find = [&basis](const IrfState& st) {
    const auto it = std::lower_bound(basis.begin(), basis.end(), st);
    return (it != basis.end() && *it == st) ? static_cast<int>(it - basis.begin()) : -1;
  };
  Mat T = Mat::Zero(d, d);
  std::vector<cplx> zv(z.begin(), z.end());
  parallel_for(
      d,
      [&](std::ptrdiff_t col) {
        CoeffMap v;
        v[basis[static_cast<size_t>(col)]] = 1.0;
        const CoeffMap tv = transfer_apply(v, w, zv, 0.0, ep, false, N);
        for (const auto& [st, amp] : tv) {
          const int row = find(st);
          if (row >= 0) T(row, static_cast<Eigen::Index>(col)) = amp;
        }
      },
      exec);
  return T;
}

SpectrumResult brute_force_spectrum(const Mat& T) {
  Eigen::ComplexEigenSolver<Mat> es(T);
  SpectrumResult out;
  out.eigenvalues = es.eigenvalues();
  out.eigenvectors = es.eigenvectors();
  out.eigenvector_residuals = Vec(T.rows());
  for (int i = 0; i < T.rows(); ++i) {
    const Vec v = out.eigenvectors.col(i);
    out.eigenvector_residuals(i) = (T * v - out.eigenvalues(i) * v).norm() / v.norm();
  }
  return out;
}

double commutator_norm(const Mat& A, const Mat& B) {
  return (A * B - B * A).norm();
}

namespace {

// composition index of the path |a>: slot weights a_j - a_{j+1} = 1 - 2 m_j
WeightIndex path_index(const IrfState& a) {
  const int n = static_cast<int>(a.heights.size());
  std::vector<int> m(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) {
    const int diff = a.heights[static_cast<size_t>(j)] - a.heights[static_cast<size_t>((j + 1) % n)];
    m[static_cast<size_t>(j)] = (1 - diff) / 2;
  }
  return WeightIndex{m};
}

}  // namespace

RestrictedVector bethe_eigenvector_restricted(const ZeroWeightFn& apsi, int N) {
  const auto& space = *apsi.space;
  const int n = space.chain.n();
  const auto& ep = space.chain.ell;
  RestrictedVector out;
  out.basis = restricted_basis(N, n);
  out.coeff = Vec(static_cast<Eigen::Index>(out.basis.size()));
  const ZeroWeightFn ar = to_reduced(apsi);
  for (size_t i = 0; i < out.basis.size(); ++i) {
    const IrfState& a = out.basis[i];
    const WeightIndex M = path_index(a);
    const int p = space.find(M);
    if (p < 0) throw std::logic_error("restricted vector: path index missing");
    out.coeff(static_cast<Eigen::Index>(i)) =
        ar(2.0 * ep.eta * static_cast<double>(a.heights[0]))(p);
  }
  out.zero = out.coeff.lpNorm<Eigen::Infinity>() < 1e-9;
  return out;
}

double restricted_eigen_residual(const RestrictedVector& v, cplx eps, int N,
                                 cplx w, std::span<const cplx> z,
                                 const EllipticParams& ep) {
  if (v.zero) throw std::domain_error("restricted vector is zero: Bethe state projects out");
  const Mat T = restricted_transfer_matrix(N, static_cast<int>(v.basis[0].heights.size()),
                                           w, z, ep);
  return (T * v.coeff - eps * v.coeff).norm() / v.coeff.norm();
}

double infinite_restricted_check(const ZeroWeightFn& apsi, int a_max, cplx w,
                                 cplx eps, double neutral_tol) {
  const auto& space = *apsi.space;
  const int n = space.chain.n();
  const auto& ep = space.chain.ell;
  const ZeroWeightFn ar = to_reduced(apsi);

  // all cyclic +-1 paths with heights in [0, a_max + 1]
  std::vector<IrfState> paths;
  std::vector<int> h(static_cast<size_t>(n));
  auto rec = [&](auto&& self, int pos) -> void {
    if (pos == n) {
      if (std::abs(h[static_cast<size_t>(n - 1)] - h[0]) == 1) paths.push_back({h});
      return;
    }
    for (int step : {-1, 1}) {
      const int v = h[static_cast<size_t>(pos - 1)] + step;
      if (v < 0 || v > a_max + 1) continue;
      h[static_cast<size_t>(pos)] = v;
      self(self, pos + 1);
    }
  };
  for (int first = 0; first <= a_max + 1; ++first) {
    h[0] = first;
    rec(rec, 1);
  }

  CoeffMap coeffs;
  double scale = 0.0;
  for (const auto& a : paths) {
    const int p = space.find(path_index(a));
    if (p < 0) continue;
    const cplx val = ar(2.0 * ep.eta * static_cast<double>(a.heights[0]))(p);
    const bool neutral =
        std::any_of(a.heights.begin(), a.heights.end(), [](int x) { return x == 0; });
    if (neutral) {
      if (std::abs(val) > neutral_tol)
        throw std::domain_error("infinite restricted check: neutral coefficient " +
                                a.str() + " does not vanish");
      continue;  // T^+ sums over positive rows only
    }
    coeffs[a] = val;
    scale = std::max(scale, std::abs(val));
  }
  const CoeffMap tv = transfer_apply(coeffs, w, space.chain.z, 0.0, ep, true);
  double worst = 0.0;
  for (const auto& [b, val] : tv) {
    bool inside = true;
    for (int x : b.heights)
      if (x < 1 || x > a_max) inside = false;
    if (!inside) continue;  // rows touching the window boundary read truncated data
    const auto it = coeffs.find(b);
    const cplx ref = it == coeffs.end() ? cplx{0.0, 0.0} : it->second;
    worst = std::max(worst, std::abs(val - eps * ref) / std::max(scale, 1e-300));
  }
  return worst;
}

RestrictedPipeline solve_restricted_bethe(const BetheProblem& pb, int N,
                                          const SolveOptions& opt) {
  RestrictedPipeline out;
  if (pb.variant != BetheVariant::fundamental_irf) {
    out.note = "pipeline expects the fundamental-case equations";
    return out;
  }
  const auto sols = solve_bae_all(pb, opt);
  if (sols.empty()) {
    out.note = "no Bethe solution converged";
    return out;
  }
  std::vector<int> lam_int(pb.model.lambdas.size(), 1);
  auto space = LevelSpace::make(Chain::quotient(lam_int, pb.model.z, pb.model.ell), pb.m);
  int skipped = 0;
  for (const auto& sol : sols) {
    const ZeroWeightFn psi = eigenfunction_h(sol, space, pb.c);
    const ZeroWeightFn apsi = antisymmetrize(psi);
    RestrictedVector vec = bethe_eigenvector_restricted(apsi, N);
    if (vec.zero) {
      ++skipped;
      continue;
    }
    out.ok = true;
    out.sol = sol;
    out.space = space;
    out.psi = psi;
    out.apsi = apsi;
    out.vec = std::move(vec);
    if (skipped > 0)
      out.note = std::to_string(skipped) + " solution(s) projected to zero and were skipped";
    return out;
  }
  out.note = "every Bethe state projected to zero on the admissible heights";
  return out;
}

std::string spectrum_report_json(int N, int n, cplx w, const EllipticParams& ep,
                                 const SpectrumResult& spec, double comm_norm,
                                 std::span<const cplx> bethe_eigenvalues) {
  nlohmann::json j;
  auto pair = [](cplx v) { return nlohmann::json::array({v.real(), v.imag()}); };
  j["N"] = N;
  j["n"] = n;
  j["tau"] = pair(ep.tau);
  j["eta"] = pair(ep.eta);
  j["w"] = pair(w);
  j["basis_order"] = "height sequences, lexicographic";
  nlohmann::json evs = nlohmann::json::array();
  for (int i = 0; i < spec.eigenvalues.size(); ++i) evs.push_back(pair(spec.eigenvalues(i)));
  j["eigenvalues"] = evs;
  j["commutator_norm"] = comm_norm;
  nlohmann::json bm = nlohmann::json::array();
  for (const cplx& e : bethe_eigenvalues) {
    double best = 1e300;
    for (int i = 0; i < spec.eigenvalues.size(); ++i)
      best = std::min(best, std::abs(spec.eigenvalues(i) - e));
    bm.push_back({{"value", pair(e)}, {"distance_to_spectrum", best}});
  }
  j["bethe_matches"] = bm;
  return j.dump(2);
}

}  // namespace elab
