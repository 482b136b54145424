#include "elab/sampling.hpp"

namespace elab {

double Sampler::uniform(double lo, double hi) {
  // fixed-width draw so sequences are reproducible across platforms
  const uint64_t u = rng_();
  const double x = static_cast<double>(u >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * x;
}

int Sampler::uniform_int(int lo, int hi) {
  const uint64_t span = static_cast<uint64_t>(hi - lo + 1);
  return lo + static_cast<int>(rng_() % span);
}

cplx Sampler::box(double re_lo, double re_hi, double im_lo, double im_hi) {
  const double re = uniform(re_lo, re_hi);
  const double im = uniform(im_lo, im_hi);
  return {re, im};
}

}  // namespace elab
