#pragma once

// Exact characteristic polynomials over the rationals and their roots.
// Test-only oracle: independent of the library's eigensolver path.

#include <gmpxx.h>

#include <complex>
#include <utility>
#include <vector>

namespace oracle {

using Poly = std::vector<mpq_class>;  // coefficients, lowest degree first
using RationalMatrix = std::vector<std::vector<mpq_class>>;

inline void trim(Poly& p) {
  while (p.size() > 1 && p.back() == 0) p.pop_back();
}

inline int degree(const Poly& p) {
  return (p.size() == 1 && p[0] == 0) ? -1 : static_cast<int>(p.size()) - 1;
}

// Faddeev-LeVerrier: det(xI - M), monic.
inline Poly charpoly(const RationalMatrix& m) {
  const int n = static_cast<int>(m.size());
  Poly c(n + 1);
  c[n] = 1;
  RationalMatrix mk(n, std::vector<mpq_class>(n, 0));  // M_0 = 0
  RationalMatrix am(n, std::vector<mpq_class>(n, 0));
  for (int k = 1; k <= n; ++k) {
    // M_k = A M_{k-1} + c_{n-k+1} I
    RationalMatrix next(n, std::vector<mpq_class>(n, 0));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        mpq_class s = 0;
        for (int l = 0; l < n; ++l) s += m[i][l] * mk[l][j];
        next[i][j] = s;
      }
      next[i][i] += c[n - k + 1];
    }
    mk = std::move(next);
    mpq_class trace = 0;
    for (int i = 0; i < n; ++i) {
      for (int l = 0; l < n; ++l) trace += m[i][l] * mk[l][i];
    }
    c[n - k] = -trace / k;
  }
  return c;
}

inline Poly derivative(const Poly& p) {
  if (p.size() <= 1) return {0};
  Poly d(p.size() - 1);
  for (std::size_t i = 1; i < p.size(); ++i) d[i - 1] = p[i] * static_cast<long>(i);
  trim(d);
  return d;
}

inline std::pair<Poly, Poly> divmod(Poly a, const Poly& b) {
  const int db = degree(b);
  if (degree(a) < db) return {{0}, a};
  Poly q(a.size() - b.size() + 1, 0);
  for (int k = degree(a); k >= db; --k) {
    const mpq_class f = a[k] / b[db];
    q[k - db] = f;
    for (int i = 0; i <= db; ++i) a[k - db + i] -= f * b[i];
  }
  a.resize(db > 0 ? db : 1);
  trim(a);
  trim(q);
  return {q, a};
}

inline Poly monic(Poly p) {
  const mpq_class lead = p.back();
  for (auto& c : p) c /= lead;
  return p;
}

inline Poly gcd(Poly a, Poly b) {
  while (degree(b) >= 0) {
    Poly r = divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return monic(a);
}

// Yun's algorithm: p = prod f_i^i with f_i square-free and coprime.
inline std::vector<std::pair<Poly, int>> squarefree(const Poly& p) {
  std::vector<std::pair<Poly, int>> out;
  Poly a = monic(p);
  Poly b = derivative(a);
  Poly c = gcd(a, b);
  Poly w = divmod(a, c).first;
  Poly y = divmod(b, c).first;
  Poly z = y;
  {
    Poly dw = derivative(w);
    for (std::size_t i = 0; i < z.size() || i < dw.size(); ++i) {
      if (i >= z.size()) z.push_back(0);
      z[i] -= i < dw.size() ? dw[i] : mpq_class(0);
    }
    trim(z);
  }
  int i = 1;
  while (degree(w) > 0) {
    Poly g = gcd(w, z);
    if (degree(g) > 0) out.emplace_back(g, i);
    w = divmod(w, g).first;
    y = divmod(z, g).first;
    Poly dw = derivative(w);
    z = y;
    for (std::size_t k = 0; k < z.size() || k < dw.size(); ++k) {
      if (k >= z.size()) z.push_back(0);
      z[k] -= k < dw.size() ? dw[k] : mpq_class(0);
    }
    trim(z);
    ++i;
  }
  return out;
}

// Simple roots of a square-free polynomial: Durand-Kerner then Newton polish.
inline std::vector<std::complex<long double>> simple_roots(const Poly& p) {
  using C = std::complex<long double>;
  const int d = degree(p);
  std::vector<C> coef(d + 1);
  for (int i = 0; i <= d; ++i) coef[i] = static_cast<long double>(mpq_class(p[i] / p[d]).get_d());
  auto eval = [&](C x) {
    C v = coef[d];
    for (int i = d - 1; i >= 0; --i) v = v * x + coef[i];
    return v;
  };
  auto deval = [&](C x) {
    C v = coef[d] * static_cast<long double>(d);
    for (int i = d - 1; i >= 1; --i) v = v * x + coef[i] * static_cast<long double>(i);
    return v;
  };
  std::vector<C> z(d);
  const C seed(0.4L, 0.9L);
  for (int i = 0; i < d; ++i) z[i] = std::pow(seed, i);
  for (int iter = 0; iter < 2000; ++iter) {
    long double change = 0;
    for (int i = 0; i < d; ++i) {
      C denom = 1;
      for (int j = 0; j < d; ++j) {
        if (j != i) denom *= z[i] - z[j];
      }
      const C step = eval(z[i]) / denom;
      z[i] -= step;
      change = std::max(change, std::abs(step));
    }
    if (change < 1e-18L) break;
  }
  for (auto& r : z) {
    for (int k = 0; k < 5; ++k) {
      const C dv = deval(r);
      if (std::abs(dv) == 0) break;
      r -= eval(r) / dv;
    }
  }
  return z;
}

// All eigenvalues with multiplicity.
inline std::vector<std::complex<double>> exact_spectrum(const RationalMatrix& m) {
  std::vector<std::complex<double>> out;
  for (const auto& [factor, mult] : squarefree(charpoly(m))) {
    for (auto r : simple_roots(factor)) {
      for (int k = 0; k < mult; ++k) {
        out.emplace_back(static_cast<double>(r.real()), static_cast<double>(r.imag()));
      }
    }
  }
  return out;
}

}  // namespace oracle
