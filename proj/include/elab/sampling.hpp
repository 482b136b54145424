#pragma once

#include <random>
#include <vector>

#include "elab/elliptic.hpp"

namespace elab {

// Seeded deterministic sampler used by all "random" checks. Generic draws
// keep a documented margin (default 0.05) from Z + tau Z in every argument
// the caller asks to guard.
class Sampler {
 public:
  explicit Sampler(uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi);
  int uniform_int(int lo, int hi);  // inclusive
  cplx box(double re_lo, double re_hi, double im_lo, double im_hi);

  // complex point whose guarded combinations stay >= margin away from the
  // lattice; guard(x) must list the arguments to protect.
  template <class Guard>
  cplx generic(cplx tau, double margin, Guard&& guard,
               double re_lo = -0.5, double re_hi = 0.5,
               double im_lo = -0.25, double im_hi = 0.25) {
    for (int tries = 0; tries < 4096; ++tries) {
      const cplx x = box(re_lo, re_hi, im_lo, im_hi);
      bool ok = true;
      for (const cplx& arg : guard(x))
        if (lattice_distance(arg, tau) < margin) { ok = false; break; }
      if (ok) return x;
    }
    throw std::runtime_error("Sampler: exhausted draws under exclusion zones");
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace elab
