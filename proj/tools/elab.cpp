// Batch front end: identity suites, R-matrix dumps, Bethe solves, restricted
// spectra and vanishing reports, all emitted as flat JSON.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "elab/irf.hpp"
#include "elab/report.hpp"

namespace {

using namespace elab;

nlohmann::json cpair(cplx v) { return nlohmann::json::array({v.real(), v.imag()}); }

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open output file " + path);
  os << text;
}

double env_tol() {
  if (const char* s = std::getenv("ELAB_TOL")) return std::atof(s);
  return 1e-10;
}

struct CommonOpts {
  double tau_re = 0.2, tau_im = 0.8;
  double eta_re = 0.1137, eta_im = 0.0391;
  double p_re = 0.13, p_im = 0.79;
  std::string out;
  std::string config;

  void attach(CLI::App* app) {
    app->add_option("--tau-re", tau_re);
    app->add_option("--tau-im", tau_im);
    app->add_option("--eta-re", eta_re);
    app->add_option("--eta-im", eta_im);
    app->add_option("--p-re", p_re);
    app->add_option("--p-im", p_im);
    app->add_option("--out", out, "output path (default stdout)");
    app->add_option("--config", config, "JSON config overriding the flags");
  }

  EllipticParams params() const {
    EllipticParams ep;
    ep.tau = {tau_re, tau_im};
    ep.eta = {eta_re, eta_im};
    ep.p = {p_re, p_im};
    ep.tol = env_tol();
    ep.validate();
    return ep;
  }

  void load_config() {
    if (config.empty()) return;
    std::ifstream is(config);
    if (!is) throw std::invalid_argument("config file not found: " + config);
    nlohmann::json j;
    is >> j;
    auto get = [&](const char* key, double& slot) {
      if (j.contains(key)) slot = j[key].get<double>();
    };
    get("tau_re", tau_re);
    get("tau_im", tau_im);
    get("eta_re", eta_re);
    get("eta_im", eta_im);
    get("p_re", p_re);
    get("p_im", p_im);
  }
};

int cmd_verify(const std::string& suite, uint64_t seed, const std::string& out) {
  const SuiteResult res = run_suite(suite, seed);
  emit(suite_report_json(res), out);
  for (const auto& c : res.checks)
    std::cerr << (c.pass ? "  ok   " : "  FAIL ") << c.name << "  residual "
              << c.residual << " (tol " << c.tol << ")\n";
  return res.pass ? exit_ok : exit_tolerance;
}

int cmd_rmatrix(CommonOpts& common, double L1, double L2, double z, double lam_re,
                double lam_im, int m) {
  const EllipticParams ep = common.params();
  const RMatrixBlock blk = build_rmatrix(L1, L2, z, {lam_re, lam_im}, m, ep);
  emit(blk.dump_json() + "\n", common.out);
  return exit_ok;
}

int cmd_bethe(CommonOpts& common, const std::string& variant, int n, int m,
              double c_re, double c_im, uint64_t seed) {
  EllipticParams ep = common.params();
  BetheProblem pb;
  pb.m = m;
  pb.c = {c_re, c_im};
  if (variant == "h") pb.variant = BetheVariant::h_type;
  else if (variant == "transfer") pb.variant = BetheVariant::transfer;
  else if (variant == "fundamental") pb.variant = BetheVariant::fundamental_irf;
  else throw std::invalid_argument("variant must be h | transfer | fundamental");
  if (n != 2 * m)
    throw std::invalid_argument("unit-weight chains need n = 2m for a zero-weight space");
  pb.model.ell = ep;
  for (int j = 0; j < n; ++j) {
    pb.model.lambdas.push_back(1.0);
    pb.model.z.push_back(cplx{0.03 + 0.24 * j, 0.0});
  }
  SolveOptions opt;
  opt.seed = seed;
  const BetheSolution sol = solve_bae(pb, opt);
  nlohmann::json j;
  j["variant"] = variant;
  j["tau"] = cpair(ep.tau);
  j["eta"] = cpair(ep.eta);
  j["c"] = cpair(pb.c);
  j["z"] = nlohmann::json::array();
  for (const auto& zz : pb.model.z) j["z"].push_back(cpair(zz));
  j["lambdas"] = nlohmann::json::array();
  for (const auto& l : pb.model.lambdas) j["lambdas"].push_back(cpair(l));
  j["roots"] = nlohmann::json::array();
  for (const auto& t : sol.roots) j["roots"].push_back(cpair(t));
  j["residual"] = sol.residual;
  j["ok"] = sol.ok;
  j["trace"] = sol.trace;
  emit(j.dump(2) + "\n", common.out);
  return sol.ok ? exit_ok : exit_solver;
}

int cmd_irf_spectrum(CommonOpts& common, int N, int n, double w_re, double w_im,
                     bool eta_given) {
  EllipticParams ep = common.params();
  if (eta_given &&
      std::abs(ep.eta - cplx{1.0 / (2.0 * N), 0.0}) > 1e-12)
    throw std::invalid_argument("restricted spectra require eta = 1/(2N)");
  ep.eta = {1.0 / (2.0 * N), 0.0};  // restricted models live at eta = 1/2N
  std::vector<cplx> z;
  for (int j = 0; j < n; ++j) z.push_back(cplx{0.03 + 0.24 * j, 0.0});
  const cplx w{w_re, w_im};
  const Mat T1 = restricted_transfer_matrix(N, n, w, z, ep);
  const Mat T2 = restricted_transfer_matrix(N, n, w + cplx{0.11, 0.05}, z, ep);
  const SpectrumResult spec = brute_force_spectrum(T1);
  emit(spectrum_report_json(N, n, w, ep, spec, commutator_norm(T1, T2), {}) + "\n",
       common.out);
  return exit_ok;
}

int cmd_vanishing(CommonOpts& common, int N, int n, uint64_t seed) {
  if (N < 2 || n % 2 != 0 || n < 2)
    throw std::invalid_argument("vanishing-report needs N >= 2 and even n");
  EllipticParams ep = common.params();
  ep.eta = {1.0 / (2.0 * N), 0.0};
  BetheProblem pb;
  pb.variant = BetheVariant::fundamental_irf;
  for (int j = 0; j < n; ++j) {
    pb.model.lambdas.push_back(1.0);
    pb.model.z.push_back(cplx{0.04 + 0.22 * j, 0.0});
  }
  pb.model.ell = ep;
  pb.c = {0.0, kPi};  // e^{2c} = 1
  pb.m = n / 2;
  SolveOptions opt;
  opt.seed = seed;
  opt.multistart = 48;
  const RestrictedPipeline pl = solve_restricted_bethe(pb, N, opt);
  if (!pl.ok) {
    std::cerr << "solver failure: " << pl.note << "\n";
    return exit_solver;
  }
  const VanishingReport rep = vanishing_report(pl.apsi, N, pb.c);
  nlohmann::json j;
  j["N"] = N;
  j["n"] = n;
  j["tau"] = cpair(ep.tau);
  j["eta"] = cpair(ep.eta);
  j["bae_residual"] = pl.sol.residual;
  j["rows"] = nlohmann::json::array();
  for (const auto& row : rep.rows)
    j["rows"].push_back({{"M", row.M.parts},
                         {"k", row.k},
                         {"magnitude", row.magnitude},
                         {"forced", row.forced}});
  j["max_forced"] = rep.max_forced;
  j["min_unforced"] = rep.min_unforced;
  const double tol = env_tol() > 1e-8 ? env_tol() : 1e-8;
  j["pass"] = rep.max_forced < tol;
  emit(j.dump(2) + "\n", common.out);
  return rep.max_forced < tol ? exit_ok : exit_tolerance;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"elliptic lattice laboratory"};
  app.require_subcommand(1);

  CommonOpts common;

  auto* verify = app.add_subcommand("verify", "run an identity suite");
  std::string suite = "all";
  uint64_t seed = 7;
  verify->add_option("--suite", suite, "one of: theta weights rmatrix rmatrix-poles "
                                       "qkzb resonance bethe irf star-triangle fusion all");
  verify->add_option("--seed", seed);
  std::string verify_out;
  verify->add_option("--out", verify_out);

  auto* rmx = app.add_subcommand("rmatrix", "dump an R-matrix block");
  double L1 = 1.3, L2 = 0.9, zr = 0.31, lam_re = 0.17, lam_im = 0.05;
  int m = 1;
  rmx->add_option("--L1", L1);
  rmx->add_option("--L2", L2);
  rmx->add_option("--z", zr);
  rmx->add_option("--lambda-re", lam_re);
  rmx->add_option("--lambda-im", lam_im);
  rmx->add_option("--m", m);
  common.attach(rmx);

  auto* bet = app.add_subcommand("bethe", "solve a Bethe system");
  std::string variant = "fundamental";
  int bn = 4, bm = 2;
  double c_re = 0.0, c_im = 0.0;
  uint64_t bseed = 2024;
  bet->add_option("--variant", variant);
  bet->add_option("--n", bn);
  bet->add_option("--m", bm);
  bet->add_option("--c-re", c_re);
  bet->add_option("--c-im", c_im);
  bet->add_option("--seed", bseed);
  common.attach(bet);

  auto* irfs = app.add_subcommand("irf-spectrum", "restricted transfer spectrum");
  int N = 4, irf_n = 4;
  double w_re = 0.3, w_im = 0.0;
  irfs->add_option("--N", N);
  irfs->add_option("--n", irf_n);
  irfs->add_option("--w", w_re);
  irfs->add_option("--w-im", w_im);
  common.attach(irfs);

  auto* van = app.add_subcommand("vanishing-report", "forced-vanishing certificate");
  int vN = 4, vn = 4;
  uint64_t vseed = 7;
  van->add_option("--N", vN);
  van->add_option("--n", vn);
  van->add_option("--seed", vseed);
  common.attach(van);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : elab::exit_config;
  }

  try {
    common.load_config();
    if (verify->parsed()) return cmd_verify(suite, seed, verify_out);
    if (rmx->parsed()) return cmd_rmatrix(common, L1, L2, zr, lam_re, lam_im, m);
    if (bet->parsed()) return cmd_bethe(common, variant, bn, bm, c_re, c_im, bseed);
    if (irfs->parsed())
      return cmd_irf_spectrum(common, N, irf_n, w_re, w_im,
                              irfs->count("--eta-re") > 0 || irfs->count("--eta-im") > 0);
    if (van->parsed()) return cmd_vanishing(common, vN, vn, vseed);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return elab::exit_config;
  } catch (const std::domain_error& e) {
    std::cerr << "singular parameters: " << e.what() << "\n";
    return elab::exit_solver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return elab::exit_solver;
  }
  return elab::exit_config;
}
