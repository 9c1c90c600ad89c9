#pragma once

// Test-only oracles and generators. The oracles deliberately avoid the
// library's code paths: direct double sums, naive polynomial products,
// finite differences, and brute-force orbit search.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <random>
#include <vector>

#include "fprlab/fprlab.hpp"

namespace fprlab::test {

using cplx = std::complex<double>;

inline ComplexSignal random_signal(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<cplx> x(n);
  for (auto& v : x) v = cplx(g(rng), g(rng));
  return ComplexSignal(std::move(x));
}

/// r(n) for n in -N+1..N-1 by the double sum over all index pairs.
inline std::vector<cplx> oracle_autocorrelation_full(const ComplexSignal& x) {
  const long n = static_cast<long>(x.size());
  std::vector<cplx> r(2 * n - 1);
  for (long lag = -n + 1; lag < n; ++lag) {
    cplx acc{};
    for (long k = 0; k < n; ++k) {
      for (long l = 0; l < n; ++l) {
        if (l - k == lag) acc += std::conj(x[static_cast<std::size_t>(k)]) * x[static_cast<std::size_t>(l)];
      }
    }
    r[static_cast<std::size_t>(lag + n - 1)] = acc;
  }
  return r;
}

/// |sum_n x(n) e^{-i w n}|^2 with explicit exponentials.
inline double oracle_intensity(const ComplexSignal& x, double w) {
  cplx acc{};
  for (std::size_t n = 0; n < x.size(); ++n) acc += x[n] * std::exp(cplx(0.0, -w * static_cast<double>(n)));
  return std::norm(acc);
}

/// Ascending coefficients of lead * prod (z - roots[k]) by repeated convolution.
inline std::vector<cplx> oracle_expand(const std::vector<cplx>& roots, cplx lead) {
  std::vector<cplx> p{lead};
  for (const auto& r : roots) {
    std::vector<cplx> q(p.size() + 1);
    for (std::size_t k = 0; k < p.size(); ++k) {
      q[k + 1] += p[k];
      q[k] -= r * p[k];
    }
    p = q;
  }
  return p;
}

/// Relative distance min over phase of ||a - e^{i phi} b|| by a fine phase
/// scan refined with golden-section search, over both orientations.
inline double oracle_orbit_distance(const ComplexSignal& a, const ComplexSignal& b) {
  auto dist = [&](const ComplexSignal& bb, double phi) {
    double s = 0.0;
    const cplx rot = std::polar(1.0, phi);
    for (std::size_t k = 0; k < a.size(); ++k) s += std::norm(a[k] - rot * bb[k]);
    return std::sqrt(s);
  };
  double best = 1e300;
  for (const auto& bb : {b, conj_reflect(b)}) {
    double lo = 0.0;
    double best_phi = 0.0;
    double best_val = 1e300;
    for (int i = 0; i < 720; ++i) {
      const double phi = kTwoPi * i / 720.0;
      const double v = dist(bb, phi);
      if (v < best_val) {
        best_val = v;
        best_phi = phi;
      }
    }
    lo = best_phi - kTwoPi / 720.0;
    double hi = best_phi + kTwoPi / 720.0;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int i = 0; i < 100; ++i) {
      const double c = hi - gr * (hi - lo);
      const double d = lo + gr * (hi - lo);
      if (dist(bb, c) < dist(bb, d)) hi = d; else lo = c;
    }
    best = std::min({best, best_val, dist(bb, 0.5 * (lo + hi))});
  }
  return best / std::max(norm2(a), norm2(b));
}

/// No self-paired roots, and the 2N-2 roots of S pairwise separated.
inline bool is_generic(const ZeroPairing& p, double sep = 1e-3) {
  std::vector<cplx> roots;
  for (const auto& pr : p.pairs) {
    if (pr.unit_circle) return false;
    if (std::abs(std::abs(pr.gamma) - 1.0) < sep) return false;
    roots.push_back(pr.gamma);
    roots.push_back(pr.gamma_recip);
  }
  for (std::size_t i = 0; i < roots.size(); ++i) {
    for (std::size_t j = i + 1; j < roots.size(); ++j) {
      if (std::abs(roots[i] - roots[j]) < sep * std::max(1.0, std::abs(roots[i]))) return false;
    }
  }
  return true;
}

/// Ground-truth choice vector of x within a pairing: pair k takes gamma when
/// X(gamma) vanishes (relative to the scale of the evaluation).
inline std::vector<bool> truth_choices(const ComplexSignal& x, const ZeroPairing& p) {
  std::vector<bool> out;
  for (const auto& pr : p.pairs) {
    const double at_gamma = std::abs(eval_ztransform(x, pr.gamma));
    const double at_recip = std::abs(eval_ztransform(x, pr.gamma_recip));
    out.push_back(at_gamma * std::abs(pr.gamma_recip) <= at_recip * std::abs(pr.gamma));
  }
  return out;
}

inline double max_abs_diff(std::span<const cplx> a, std::span<const cplx> b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

}  // namespace fprlab::test
