#include "elab/zero_weight.hpp"

#include <random>

namespace elab {

std::vector<WeightIndex> compositions(int m, int n) {
  std::vector<WeightIndex> out;
  std::vector<int> cur(static_cast<size_t>(n), 0);
  auto rec = [&](auto&& self, int pos, int left) -> void {
    if (pos == n - 1) {
      cur[static_cast<size_t>(pos)] = left;
      out.emplace_back(cur);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      cur[static_cast<size_t>(pos)] = v;
      self(self, pos + 1, left - v);
    }
  };
  if (n > 0 && m >= 0) rec(rec, 0, m);
  return out;
}

int Chain::cap(int slot) const {
  return finite ? int_lambdas[static_cast<size_t>(slot)] : 1 << 20;
}

Mat Chain::pair_block(int a, int b, cplx zspec, cplx lam, int level) const {
  if (finite) {
    const int La = int_lambdas[static_cast<size_t>(a)];
    const int Lb = int_lambdas[static_cast<size_t>(b)];
    if (La == 1 && Lb == 1)
      return fundamental_block(zspec, lam, level, ell).entries;
    return quotient_rmatrix(La, Lb, zspec, lam, level, ell).entries;
  }
  return build_rmatrix(lambdas[static_cast<size_t>(a)], lambdas[static_cast<size_t>(b)],
                       zspec, lam, level, ell)
      .entries;
}

int Chain::pair_base(int a, int b, int level) const {
  (void)a;
  return finite ? std::max(0, level - int_lambdas[static_cast<size_t>(b)]) : 0;
}

Chain Chain::verma(std::vector<cplx> lambdas, std::vector<cplx> z, EllipticParams ep) {
  Chain c;
  c.lambdas = std::move(lambdas);
  c.z = std::move(z);
  c.ell = ep;
  return c;
}

Chain Chain::quotient(std::vector<int> lambdas, std::vector<cplx> z, EllipticParams ep) {
  Chain c;
  c.finite = true;
  c.int_lambdas = std::move(lambdas);
  c.lambdas.reserve(c.int_lambdas.size());
  for (int l : c.int_lambdas) c.lambdas.emplace_back(static_cast<double>(l), 0.0);
  c.z = std::move(z);
  c.ell = ep;
  return c;
}

int LevelSpace::find(const WeightIndex& M) const {
  for (int p = 0; p < dim(); ++p)
    if (basis[static_cast<size_t>(p)] == M) return p;
  return -1;
}

std::shared_ptr<const LevelSpace> LevelSpace::make(Chain chain, int m) {
  auto sp = std::make_shared<LevelSpace>();
  sp->m = m;
  for (auto& M : compositions(m, chain.n())) {
    bool ok = true;
    if (chain.finite)
      for (int j = 0; j < M.n(); ++j)
        if (M[j] > chain.int_lambdas[static_cast<size_t>(j)]) ok = false;
    if (ok) sp->basis.push_back(M);
  }
  sp->chain = std::move(chain);
  return sp;
}

ZeroWeightFn to_reduced(const ZeroWeightFn& f) {
  if (f.kind == BasisKind::reduced) return f;
  auto space = f.space;
  auto inner = f.eval;
  Vec scalev(space->dim());
  for (int p = 0; p < space->dim(); ++p) {
    cplx s{1.0, 0.0};
    for (int j = 0; j < space->chain.n(); ++j)
      s *= elliptic_factorial(space->basis[static_cast<size_t>(p)][j], space->chain.ell);
    scalev(p) = s;
  }
  return {space,
          [inner, scalev](cplx lam) { return Vec(scalev.cwiseProduct(inner(lam))); },
          BasisKind::reduced};
}

ZeroWeightFn to_standard(const ZeroWeightFn& f) {
  if (f.kind == BasisKind::standard) return f;
  auto space = f.space;
  auto inner = f.eval;
  Vec scalev(space->dim());
  for (int p = 0; p < space->dim(); ++p) {
    cplx s{1.0, 0.0};
    for (int j = 0; j < space->chain.n(); ++j)
      s *= elliptic_factorial(space->basis[static_cast<size_t>(p)][j], space->chain.ell);
    scalev(p) = s;
  }
  return {space,
          [inner, scalev](cplx lam) -> Vec {
            return Vec(inner(lam).cwiseQuotient(scalev));
          },
          BasisKind::standard};
}

ZeroWeightFn random_test_fn(const SpacePtr& space, uint64_t seed, int degree) {
  std::mt19937_64 rng(seed);
  auto draw = [&]() {
    const double x = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return 2.0 * x - 1.0;
  };
  const int d = space->dim();
  std::vector<std::vector<cplx>> coef(static_cast<size_t>(d));
  for (auto& row : coef) {
    row.resize(static_cast<size_t>(2 * degree + 1));
    for (auto& c : row) c = cplx{draw(), draw()};
  }
  return {space,
          [coef, degree, d](cplx lam) {
            Vec v(d);
            for (int p = 0; p < d; ++p) {
              cplx acc{0.0, 0.0};
              for (int k = -degree; k <= degree; ++k)
                acc += coef[static_cast<size_t>(p)][static_cast<size_t>(k + degree)] *
                       std::exp(2.0 * kPi * kI * static_cast<double>(k) * lam);
              v(p) = acc;
            }
            return v;
          },
          BasisKind::standard};
}

ZeroWeightFn operator+(const ZeroWeightFn& f, const ZeroWeightFn& g) {
  auto fe = f.eval, ge = g.eval;
  return {f.space, [fe, ge](cplx lam) { return Vec(fe(lam) + ge(lam)); }, f.kind};
}

ZeroWeightFn operator-(const ZeroWeightFn& f, const ZeroWeightFn& g) {
  auto fe = f.eval, ge = g.eval;
  return {f.space, [fe, ge](cplx lam) { return Vec(fe(lam) - ge(lam)); }, f.kind};
}

ZeroWeightFn scale(const ZeroWeightFn& f, cplx c) {
  auto fe = f.eval;
  return {f.space, [fe, c](cplx lam) { return Vec(c * fe(lam)); }, f.kind};
}

}  // namespace elab
