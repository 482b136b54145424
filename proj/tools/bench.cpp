// Serial vs OpenMP timing for the batched kernels.

#include <chrono>
#include <cstdio>

#include "elab/irf.hpp"
#include "elab/sampling.hpp"

using namespace elab;

namespace {

template <class F>
double time_it(F&& fn, int reps) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < reps; ++r) fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() /
         reps;
}

void row(const char* name, double serial, double par) {
  std::printf("%-38s %10.4f ms %10.4f ms %7.2fx\n", name, serial * 1e3, par * 1e3,
              serial / par);
}

}  // namespace

int main() {
  EllipticParams ep;
  ep.tau = {0.2, 0.8};
  ep.eta = {0.1137, 0.0391};
  ep.p = {0.13, 0.79};

  std::printf("%-38s %13s %13s %8s\n", "kernel", "serial", "openmp", "speedup");
  std::printf("threads: %d\n", max_threads());

  {
    Sampler smp(11);
    std::vector<cplx> pts(20000);
    for (auto& t : pts) t = smp.box(-1, 1, -0.3, 0.3);
    std::vector<cplx> out(pts.size());
    auto run = [&](Exec ex) {
      parallel_for(static_cast<std::ptrdiff_t>(pts.size()),
                   [&](std::ptrdiff_t i) { out[static_cast<size_t>(i)] = theta(pts[static_cast<size_t>(i)], ep); },
                   ex);
    };
    row("theta grid (20k points)",
        time_it([&] { run(Exec::serial); }, 3), time_it([&] { run(Exec::par); }, 3));
  }

  {
    ModelParams mp{{cplx{1.31, 0.12}, cplx{1.72, -0.08}}, {cplx{0.05, 0.0}, cplx{0.41, 0.0}}, ep};
    auto run = [&](Exec ex) { (void)basis_matrices(5, cplx{0.19, 0.07}, mp, ex); };
    row("transition matrices m=5",
        time_it([&] { run(Exec::serial); }, 3), time_it([&] { run(Exec::par); }, 3));
  }

  {
    EllipticParams epr = ep;
    epr.eta = {1.0 / 12.0, 0.0};
    std::vector<cplx> z;
    for (int j = 0; j < 8; ++j) z.push_back(cplx{0.02 + 0.11 * j, 0.0});
    auto run = [&](Exec ex) {
      (void)restricted_transfer_matrix(6, 8, cplx{0.3, 0.1}, z, epr, ex);
    };
    row("restricted transfer N=6 n=8",
        time_it([&] { run(Exec::serial); }, 2), time_it([&] { run(Exec::par); }, 2));
  }
  return 0;
}
