#include <doctest.h>

#include "elab/irf.hpp"
#include "elab/sampling.hpp"

using namespace elab;

namespace {

EllipticParams pipeline_params() {
  EllipticParams ep;
  ep.tau = {0.1, 1.0};
  ep.eta = {0.125, 0.0};  // 1/(2N) with N = 4
  ep.p = {0.0, 0.9};
  return ep;
}

const std::vector<cplx> kZ4{{0.04, 0.0}, {0.23, 0.0}, {0.47, 0.0}, {0.68, 0.0}};

BetheProblem fundamental_problem() {
  BetheProblem pb;
  pb.variant = BetheVariant::fundamental_irf;
  pb.model.lambdas = {1.0, 1.0, 1.0, 1.0};
  pb.model.z = kZ4;
  pb.model.ell = pipeline_params();
  pb.c = {0.0, kPi};  // e^{2c} = 1 with a nonzero antisymmetrization
  pb.m = 2;
  return pb;
}

// shared across the heavy test cases
const RestrictedPipeline& pipeline() {
  static const RestrictedPipeline pl = [] {
    SolveOptions opt;
    opt.seed = 2024;
    opt.multistart = 48;
    return solve_restricted_bethe(fundamental_problem(), 4, opt);
  }();
  return pl;
}

std::vector<cplx> grid(const EllipticParams& ep, int count) {
  std::vector<cplx> out;
  cplx cand{0.0312, 0.0177};
  const cplx step{0.0931, 0.0117};
  while (static_cast<int>(out.size()) < count) {
    cand += step;
    bool ok = true;
    for (int j = -10; j <= 10; ++j)
      if (lattice_distance(cand - 2.0 * ep.eta * static_cast<double>(j), ep.tau) < 0.03)
        ok = false;
    if (ok) out.push_back(cand);
  }
  return out;
}

}  // namespace

TEST_CASE("residual basics") {
  BetheProblem pb = fundamental_problem();
  SUBCASE("no roots, no residual") {
    pb.m = 0;
    CHECK(bae_residual(pb, {}).size() == 0);
  }
  SUBCASE("permuted roots permute the residuals") {
    const std::vector<cplx> t{{0.21, 0.05}, {0.48, -0.07}};
    const Vec r1 = bae_residual(pb, t);
    const std::vector<cplx> ts{t[1], t[0]};
    const Vec r2 = bae_residual(pb, ts);
    CHECK(std::abs(r1(0) - r2(1)) < 1e-14);
    CHECK(std::abs(r1(1) - r2(0)) < 1e-14);
  }
}

TEST_CASE("trigonometric limit matches the sin-built system") {
  BetheProblem pb = fundamental_problem();
  pb.model.ell.tau = {0.1, 4.0};
  const auto& ep = pb.model.ell;
  const cplx rhs = std::exp(-4.0 * ep.eta * pb.c);
  const std::vector<cplx> t{{0.21, 0.05}, {0.48, -0.07}};
  const Vec r = bae_residual(pb, t);
  for (int i = 0; i < 2; ++i) {
    cplx prod{1.0, 0.0};
    for (int k = 0; k < 4; ++k)
      prod *= theta_trig(t[static_cast<size_t>(i)] - pb.model.z[static_cast<size_t>(k)] + ep.eta, ep) /
              theta_trig(t[static_cast<size_t>(i)] - pb.model.z[static_cast<size_t>(k)] - ep.eta, ep);
    for (int j = 0; j < 2; ++j) {
      if (j == i) continue;
      prod *= theta_trig(t[static_cast<size_t>(i)] - t[static_cast<size_t>(j)] - 2.0 * ep.eta, ep) /
              theta_trig(t[static_cast<size_t>(i)] - t[static_cast<size_t>(j)] + 2.0 * ep.eta, ep);
    }
    CHECK(std::abs(r(i) - (prod - rhs)) < 1e-9);
  }
}

TEST_CASE("one-variable solve against the contour-scan oracle") {
  EllipticParams ep;
  ep.tau = {0.2, 0.8};
  ep.eta = {0.1137, 0.0391};
  BetheProblem pb;
  pb.variant = BetheVariant::h_type;
  pb.model.lambdas = {1.0, 1.0};
  pb.model.z = {cplx{-0.11, 0.0}, cplx{0.37, 0.0}};
  pb.model.ell = ep;
  pb.c = 0.0;  // e^{2c} = 1
  pb.m = 1;

  SolveOptions opt;
  opt.seed = 5;
  const BetheSolution sol = solve_bae(pb, opt);
  REQUIRE(sol.ok);
  CHECK(sol.residual < 1e-11);

  // oracle: zeros of F(t) = prod theta(t - z + eta) - prod theta(t - z - eta)
  auto F = [&](cplx t) {
    return theta(t - pb.model.z[0] + ep.eta, ep) * theta(t - pb.model.z[1] + ep.eta, ep) -
           theta(t - pb.model.z[0] - ep.eta, ep) * theta(t - pb.model.z[1] - ep.eta, ep);
  };
  // winding number around a period cell offset to keep zeros interior
  const cplx corner{-0.35, -0.31};
  const int steps = 3000;
  auto seg_winding = [&](cplx a, cplx b) {
    double acc = 0.0;
    cplx prev = F(a);
    for (int k = 1; k <= steps; ++k) {
      const cplx t = a + (b - a) * (static_cast<double>(k) / steps);
      const cplx cur = F(t);
      acc += std::arg(cur / prev);
      prev = cur;
    }
    return acc;
  };
  const cplx c1 = corner, c2 = corner + 1.0, c3 = corner + 1.0 + ep.tau, c4 = corner + ep.tau;
  const double total =
      seg_winding(c1, c2) + seg_winding(c2, c3) + seg_winding(c3, c4) + seg_winding(c4, c1);
  const int zeros = static_cast<int>(std::lround(total / (2.0 * kPi)));
  CHECK(zeros == 2);  // root count in the cell

  // locate the zeros by grid scan + Newton polish; F is 1-periodic but not
  // tau-periodic, so only zeros inside this cell count and matching is mod Z
  std::vector<cplx> found;
  auto in_cell = [&](cplx t) {
    const double y = (t - corner).imag() / ep.tau.imag();
    if (y < -1e-9 || y >= 1.0 - 1e-9) return false;
    const double x = (t - corner - y * ep.tau).real();
    return x >= -1e-9 && x < 1.0 - 1e-9;
  };
  auto mod_z = [](cplx a) { return a - std::round(a.real()); };
  for (int gx = 0; gx < 40; ++gx)
    for (int gy = 0; gy < 40; ++gy) {
      cplx t = corner + cplx{(gx + 0.5) / 40.0, 0.0} + ep.tau * ((gy + 0.5) / 40.0);
      for (int it = 0; it < 60; ++it) {
        const cplx f = F(t);
        const double h = 1e-7;
        const cplx df = (F(t + h) - F(t - h)) / (2.0 * h);
        const cplx step = f / df;
        t -= step;
        if (std::abs(step) < 1e-14) break;
      }
      // reduce the real part into the cell, then keep in-cell roots only
      t -= std::floor((t - corner - ep.tau * ((t - corner).imag() / ep.tau.imag())).real());
      if (std::abs(F(t)) < 1e-11 && in_cell(t)) {
        bool dup = false;
        for (const cplx& u : found)
          if (std::abs(mod_z(u - t)) < 1e-6) dup = true;
        if (!dup) found.push_back(t);
      }
    }
  CHECK(found.size() == 2);
  bool matched = false;
  for (const cplx& u : found)
    if (std::abs(mod_z(u - sol.roots[0])) < 1e-8) matched = true;
  CHECK(matched);
}

TEST_CASE("seed with coincident roots is rejected") {
  BetheProblem pb = fundamental_problem();
  const std::vector<cplx> seeds{{0.3, 0.05}, {0.3, 0.05}};
  const BetheSolution sol = solve_bae_from(pb, seeds);
  CHECK(!sol.ok);
  REQUIRE(!sol.trace.empty());
  CHECK(sol.trace[0].find("coincident") != std::string::npos);
}

TEST_CASE("fundamental four-site pipeline") {
  const RestrictedPipeline& pl = pipeline();
  REQUIRE(pl.ok);
  const BetheSolution& sol = pl.sol;
  CHECK(sol.residual < 1e-11);
  const BetheProblem pb = fundamental_problem();
  const auto& ep = pb.model.ell;
  const SpacePtr space = pl.space;
  const ZeroWeightFn& psi = pl.psi;
  const auto lams = grid(ep, 20);

  SUBCASE("common eigenfunction of the commuting family") {
    for (int j = 1; j <= 4; ++j) {
      const OperatorOnFn H = h_operator(space, j);
      const ZeroWeightFn hpsi = H.apply(psi);
      const cplx eps = h_eigenvalue(pb, sol.roots, j);
      double worst = 0.0;
      for (const cplx& lam : lams) {
        const Vec a = hpsi(lam), b = eps * psi(lam);
        worst = std::max(worst, (a - b).lpNorm<Eigen::Infinity>() /
                                    std::max(1.0, b.lpNorm<Eigen::Infinity>()));
      }
      CHECK(worst < 1e-8);
    }
  }
  SUBCASE("transfer matrices share the eigenfunction") {
    for (cplx w : {cplx{0.31, 0.21}, cplx{-0.12, 0.4}}) {
      const OperatorOnFn T = transfer_operator(space, w);
      const ZeroWeightFn tpsi = T.apply(psi);
      const cplx eps = transfer_eigenvalue_fundamental(pb, sol.roots, w);
      double worst = 0.0;
      for (const cplx& lam : lams) {
        const Vec a = tpsi(lam), b = eps * psi(lam);
        worst = std::max(worst, (a - b).lpNorm<Eigen::Infinity>() /
                                    std::max(1.0, b.lpNorm<Eigen::Infinity>()));
      }
      CHECK(worst < 1e-8);
    }
  }
  SUBCASE("quasi-periodicity multiplier") {
    const cplx mult = std::pow(-1.0, pb.m) * std::exp(pb.c);
    double worst = 0.0;
    for (const cplx& lam : lams)
      worst = std::max(worst, (psi(lam + 1.0) - mult * psi(lam)).lpNorm<Eigen::Infinity>());
    CHECK(worst < 1e-9);
  }
  SUBCASE("reduced coefficients carry the factorial weights") {
    const ZeroWeightFn red = to_reduced(psi);
    const cplx lam{0.171, 0.083};
    const Vec vs = psi(lam), vr = red(lam);
    for (int p = 0; p < space->dim(); ++p) {
      cplx f{1.0, 0.0};
      for (int j = 0; j < 4; ++j)
        f *= elliptic_factorial(space->basis[static_cast<size_t>(p)][j], ep);
      CHECK(std::abs(vr(p) - f * vs(p)) < 1e-12);
    }
  }
  SUBCASE("resonance relations in both representations") {
    for (int which = 1; which <= 4; ++which)
      CHECK(h_resonance_residual(psi, which) < 1e-8);
    // the factorial-weighted form, including one lattice translate
    for (int which = 1; which <= 4; ++which)
      CHECK(resonance_condition_residual(psi, which, ep.p) < 1e-8);
    CHECK(resonance_condition_residual(psi, 2, ep.p, 0, 1) < 1e-8);
    BetheSolution mir = sol;
    for (auto& t : mir.roots) t += ep.eta;
    const ZeroWeightFn psi_m = eigenfunction_transfer(mir, space, pb.c);
    for (int which = 1; which <= 4; ++which)
      CHECK(transfer_resonance_residual(psi_m, which) < 1e-8);
    // the mirror assembly solves the chain-composition transfer family
    const cplx wc{0.31, 0.21};
    const cplx epsc = transfer_eigenvalue_fundamental(pb, sol.roots, wc);
    const OperatorOnFn Tc = transfer_operator(space, wc, TransferOrder::chain);
    const ZeroWeightFn tm = Tc.apply(psi_m);
    const cplx l1{0.151, 0.043};
    CHECK((tm(l1) - epsc * psi_m(l1)).lpNorm<Eigen::Infinity>() /
              std::max(1.0, psi_m(l1).lpNorm<Eigen::Infinity>()) <
          1e-8);
  }
  SUBCASE("antisymmetrization") {
    const ZeroWeightFn& apsi = pl.apsi;
    const OperatorOnFn S = weyl_reflection(space);
    const ZeroWeightFn sap = S.apply(apsi);
    const cplx lam{0.171, 0.083};
    CHECK((sap(lam) + apsi(lam)).lpNorm<Eigen::Infinity>() < 1e-10);
    // still an eigenfunction, same eigenvalue
    const OperatorOnFn H2 = h_operator(space, 2);
    const cplx eps = h_eigenvalue(pb, sol.roots, 2);
    const ZeroWeightFn hap = H2.apply(apsi);
    CHECK((hap(lam) - eps * apsi(lam)).lpNorm<Eigen::Infinity>() /
              std::max(1.0, apsi(lam).lpNorm<Eigen::Infinity>()) <
          1e-8);
    // every coefficient dies at lambda = 0
    CHECK(apsi(0.0).lpNorm<Eigen::Infinity>() < 1e-9);
  }
  SUBCASE("interior window identities for reduced coefficients") {
    const ZeroWeightFn red = to_reduced(psi);
    const std::vector<int> lam_int{1, 1, 1, 1};
    for (int p = 0; p < space->dim(); ++p) {
      const WeightIndex& M = space->basis[static_cast<size_t>(p)];
      const auto w = index_weight_vector(M, lam_int);
      std::vector<int> mw(w.size());
      for (size_t i = 0; i < w.size(); ++i) mw[i] = -w[i];
      std::vector<int> sM(4);
      for (int j = 0; j < 4; ++j) sM[static_cast<size_t>(j)] = 1 - M[j];
      const int q = space->find(WeightIndex{sM});
      for (int k = -shift_number(w, lam_int); k <= shift_number(mw, lam_int); ++k) {
        const cplx lhs = red(2.0 * ep.eta * static_cast<double>(k))(p);
        const cplx rhs = red(-2.0 * ep.eta * static_cast<double>(k))(q);
        CHECK(std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)) < 1e-8);
      }
    }
  }
  SUBCASE("vanishing certificate at the root of unity") {
    const ZeroWeightFn& apsi = pl.apsi;
    const VanishingReport rep = vanishing_report(apsi, 4, pb.c);
    CHECK(rep.max_forced < 1e-8);
    CHECK(rep.min_unforced > 1e-4);
    // mirror assembly: suffix sums and the modified rules
    BetheSolution mir2 = sol;
    for (auto& t : mir2.roots) t += ep.eta;
    const ZeroWeightFn am = antisymmetrize(eigenfunction_transfer(mir2, space, pb.c));
    const VanishingReport repm = vanishing_report(am, 4, pb.c, FusionKind::modified);
    CHECK(repm.max_forced < 1e-8);
    CHECK(repm.min_unforced > 1e-4);
    // N-periodicity of the relations
    const ZeroWeightFn red = to_reduced(apsi);
    for (int p = 0; p < space->dim(); ++p) {
      const cplx a0 = red(2.0 * ep.eta * 1.0)(p);
      const cplx aN = red(2.0 * ep.eta * 5.0)(p);  // k + N with N = 4
      CHECK(std::abs(aN - std::pow(-1.0, pb.m) * std::exp(pb.c) * a0) < 1e-9);
    }
  }
  SUBCASE("regularity transport near the swap-operator pole") {
    const OperatorOnFn s1 = s_operator(space, 1, kZ4[0] - kZ4[1]);
    const ZeroWeightFn spsi = s1.apply(psi);
    const ZeroWeightFn srnd = s1.apply(random_test_fn(space, 77));
    auto ring_max = [&](const ZeroWeightFn& f, double rad) {
      double mx = 0.0;
      for (int k = 0; k < 8; ++k) {
        const cplx lam = rad * std::polar(1.0, 2.0 * kPi * k / 8.0);
        mx = std::max(mx, f(lam).lpNorm<Eigen::Infinity>());
      }
      return mx;
    };
    const double good = ring_max(spsi, 1e-4) / ring_max(spsi, 1e-2);
    const double bad = ring_max(srnd, 1e-4) / ring_max(srnd, 1e-2);
    CHECK(good < 20.0);  // bounded: the residue is annihilated
    CHECK(bad > 20.0);   // a generic function blows up like the simple pole
  }
}

TEST_CASE("transfer-variant eigenfunction from mirror weight functions") {
  EllipticParams ep;
  ep.tau = {0.15, 0.9};
  ep.eta = {0.1031, 0.0};
  BetheProblem pb;
  pb.variant = BetheVariant::transfer;
  pb.model.lambdas = {1.0, 1.0};
  pb.model.z = {cplx{-0.08, 0.0}, cplx{0.41, 0.0}};
  pb.model.ell = ep;
  pb.c = {0.31, 0.12};
  pb.m = 1;
  SolveOptions opt;
  opt.seed = 9;
  const BetheSolution sol = solve_bae(pb, opt);
  REQUIRE(sol.ok);
  CHECK(sol.residual < 1e-11);

  auto space = LevelSpace::make(Chain::quotient({1, 1}, pb.model.z, ep), 1);
  const ZeroWeightFn psi = eigenfunction_transfer(sol, space, pb.c);
  double worst = 0.0;
  for (cplx w : {cplx{0.21, 0.11}, cplx{-0.33, 0.18}}) {
    const cplx eps = transfer_eigenvalue_verma(pb, sol.roots, w);
    const OperatorOnFn T = transfer_operator(space, w, TransferOrder::chain);
    const ZeroWeightFn tpsi = T.apply(psi);
    for (const cplx& lam : grid(ep, 6)) {
      const Vec a = tpsi(lam), b = eps * psi(lam);
      worst = std::max(worst, (a - b).lpNorm<Eigen::Infinity>() /
                                  std::max(1.0, b.lpNorm<Eigen::Infinity>()));
    }
  }
  CHECK(worst < 1e-8);
}
