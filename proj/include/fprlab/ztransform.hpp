#pragma once

// Polynomial side of Fourier phase retrieval. The intensity determines
// S(z) = z^{N-1} R(z); its 2N-2 roots come in pairs (gamma, 1/conj(gamma)),
// and every signal with the same intensity picks one root per pair.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "fprlab/error.hpp"
#include "fprlab/signal.hpp"

namespace fprlab {

inline constexpr double kRootTol = 1e-9;
inline constexpr double kPairTol = 1e-6;

/// Complex polynomial c(0) + c(1) z + ... + c(D) z^D.
class PolyCoeffs {
 public:
  explicit PolyCoeffs(std::vector<cplx> ascending) : c_(std::move(ascending)) {
    while (c_.size() > 1 && c_.back() == cplx{}) c_.pop_back();
    if (c_.empty()) c_.push_back({});
  }

  std::size_t degree() const noexcept { return c_.size() - 1; }
  std::span<const cplx> coeffs() const noexcept { return c_; }
  const cplx& operator[](std::size_t k) const { return c_[k]; }

  cplx operator()(cplx z) const {
    cplx acc{};
    for (std::size_t k = c_.size(); k-- > 0;) acc = acc * z + c_[k];
    return acc;
  }

  cplx derivative(cplx z) const {
    cplx acc{};
    for (std::size_t k = c_.size(); k-- > 1;) acc = acc * z + static_cast<double>(k) * c_[k];
    return acc;
  }

  double norm() const {
    double s = 0.0;
    for (const auto& v : c_) s += std::norm(v);
    return std::sqrt(s);
  }

 private:
  std::vector<cplx> c_;
};

/// X(z) = sum_k x(k) z^{-k}, via Horner on z^{N-1} X(z).
inline cplx eval_ztransform(const ComplexSignal& x, cplx z) {
  const std::size_t n = x.size();
  if (n == 1) return x[0];
  if (z == cplx{}) throw Error(ErrorKind::ZeroArgument, "Z-transform is singular at z = 0");
  cplx acc{};
  for (std::size_t k = 0; k < n; ++k) acc = acc * z + x[k];
  return acc / std::pow(z, static_cast<int>(n - 1));
}

/// S(z) = z^{N-1} R(z); coefficient of z^k is r(N-1-k).
inline PolyCoeffs build_S_poly(const Autocorrelation& r) {
  const std::size_t n = r.size();
  const cplx last = r(static_cast<long>(n) - 1);
  if (last == cplx{} || std::abs(last) <= 1e-15 * std::abs(r(0))) {
    throw Error(ErrorKind::DegenerateLeadingLag, "r(N-1) vanishes; root pairing is undefined");
  }
  std::vector<cplx> c(2 * n - 1);
  for (std::size_t k = 0; k < c.size(); ++k) {
    c[k] = r(static_cast<long>(n) - 1 - static_cast<long>(k));
  }
  return PolyCoeffs(std::move(c));
}

namespace detail {

// Parlett-Reinsch diagonal similarity scaling by powers of two.
inline void balance(Eigen::MatrixXcd& a) {
  const Eigen::Index n = a.rows();
  constexpr double radix = 2.0;
  bool done = false;
  while (!done) {
    done = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      double c = 0.0;
      double r = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i).real()) + std::abs(a(j, i).imag());
        r += std::abs(a(i, j).real()) + std::abs(a(i, j).imag());
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix;
      double f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= radix * radix;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= radix * radix;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        a.row(i) /= f;
        a.col(i) *= f;
      }
    }
  }
}

}  // namespace detail

/// All D roots with multiplicity: balanced companion-matrix eigenvalues,
/// then at most five Newton steps per root (kept only when they reduce |p|).
inline std::vector<cplx> find_roots(const PolyCoeffs& p, double tol = kRootTol) {
  const std::size_t d = p.degree();
  if (d < 1) throw Error(ErrorKind::InvalidArgument, "root finding needs degree >= 1");

  const cplx lead = p[d];
  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t i = 1; i < d; ++i) {
    companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
  }
  for (std::size_t i = 0; i < d; ++i) {
    companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d - 1)) = -p[i] / lead;
  }
  detail::balance(companion);

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::NonConvergence, "eigenvalue iteration failed for degree " + std::to_string(d));
  }

  std::vector<cplx> roots(d);
  const double pnorm = p.norm();
  for (std::size_t i = 0; i < d; ++i) {
    cplx z = solver.eigenvalues()(static_cast<Eigen::Index>(i));
    double residual = std::abs(p(z));
    for (int step = 0; step < 5 && residual > 0.0; ++step) {
      const cplx dp = p.derivative(z);
      if (dp == cplx{}) break;
      const cplx next = z - p(z) / dp;
      const double next_residual = std::abs(p(next));
      if (!(next_residual < residual)) break;
      z = next;
      residual = next_residual;
    }
    const double bound = tol * pnorm * std::pow(std::max(1.0, std::abs(z)), static_cast<double>(d));
    if (!(residual <= bound)) {
      std::string coeffs;
      for (const auto& c : p.coeffs()) {
        coeffs += "(" + std::to_string(c.real()) + "," + std::to_string(c.imag()) + ") ";
      }
      throw Error(ErrorKind::NonConvergence, "root residual " + std::to_string(residual) +
                                                 " exceeds bound for polynomial " + coeffs);
    }
    roots[i] = z;
  }
  return roots;
}

/// One factor pair (gamma, 1/conj(gamma)) of S(z). By convention gamma is the
/// member outside the unit disk. Unit-circle pairs stand for a double root of
/// S and store the same value twice.
struct RootPair {
  cplx gamma;
  cplx gamma_recip;
  bool unit_circle = false;
};

/// The factored measurement: R(z) is determined by r(N-1) and N-1 root pairs.
struct ZeroPairing {
  cplx scale;  // r(N-1)
  std::vector<RootPair> pairs;

  std::size_t signal_length() const noexcept { return pairs.size() + 1; }
};

inline double pair_residual(cplx a, cplx b) { return std::abs(a * std::conj(b) - 1.0); }

inline double pair_tolerance(cplx a, cplx b, double rel = kPairTol) {
  return rel * std::max({1.0, std::norm(a), std::norm(b)});
}

/// Checks the ZeroPairing invariants.
inline bool is_valid_pairing(const ZeroPairing& p, double rel = kPairTol) {
  if (p.scale == cplx{}) return false;
  for (const auto& pr : p.pairs) {
    if (pr.gamma == cplx{} || pr.gamma_recip == cplx{}) return false;
    if (pair_residual(pr.gamma, pr.gamma_recip) > pair_tolerance(pr.gamma, pr.gamma_recip, rel)) return false;
    if (pr.unit_circle && (pr.gamma != pr.gamma_recip || std::abs(std::abs(pr.gamma) - 1.0) > rel)) return false;
  }
  return true;
}

/// Greedy matching of each root with the remaining root minimizing
/// |gamma conj(gamma') - 1|, after lexicographic (re, im) sorting.
inline ZeroPairing pair_roots(std::vector<cplx> roots, cplx scale, double rel = kPairTol) {
  if (roots.size() % 2 != 0) {
    throw Error(ErrorKind::UnpairableRoots, "odd number of roots: " + std::to_string(roots.size()));
  }
  if (scale == cplx{}) throw Error(ErrorKind::DegenerateLeadingLag, "scale r(N-1) is zero");
  for (const auto& z : roots) {
    if (z == cplx{}) throw Error(ErrorKind::UnpairableRoots, "zero root cannot be paired");
  }
  std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  });
  auto on_unit_circle = [&](cplx z) { return std::abs(std::abs(z) - 1.0) <= pair_tolerance(z, z, rel); };

  ZeroPairing out{scale, {}};
  std::vector<bool> used(roots.size(), false);
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (used[i]) continue;
    used[i] = true;
    const bool unit = on_unit_circle(roots[i]);
    std::size_t best = roots.size();
    double best_residual = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < roots.size(); ++j) {
      if (used[j] || on_unit_circle(roots[j]) != unit) continue;
      const double res = pair_residual(roots[i], roots[j]);
      if (res < best_residual) {
        best_residual = res;
        best = j;
      }
    }
    if (best == roots.size() || best_residual > pair_tolerance(roots[i], roots[best], rel)) {
      const auto what = "root (" + std::to_string(roots[i].real()) + "," + std::to_string(roots[i].imag()) +
                        ") has no partner; best residual " + std::to_string(best_residual);
      throw Error(unit ? ErrorKind::OddUnitCircleMultiplicity : ErrorKind::UnpairableRoots, what);
    }
    used[best] = true;
    if (unit) {
      const cplx mid = 0.5 * (roots[i] + roots[best]);
      const cplx g = mid / std::abs(mid);
      out.pairs.push_back({g, g, true});
    } else if (std::abs(roots[i]) >= std::abs(roots[best])) {
      out.pairs.push_back({roots[i], roots[best], false});
    } else {
      out.pairs.push_back({roots[best], roots[i], false});
    }
  }
  std::sort(out.pairs.begin(), out.pairs.end(), [](const RootPair& a, const RootPair& b) {
    const double ma = std::abs(a.gamma);
    const double mb = std::abs(b.gamma);
    if (ma != mb) return ma < mb;
    if (a.gamma.real() != b.gamma.real()) return a.gamma.real() < b.gamma.real();
    return a.gamma.imag() < b.gamma.imag();
  });
  return out;
}

/// Root pairing of the intensity an autocorrelation describes.
inline ZeroPairing pairing_from_autocorr(const Autocorrelation& r, double rel = kPairTol) {
  const cplx scale = r(static_cast<long>(r.size()) - 1);
  if (r.size() == 1) {
    if (scale == cplx{}) throw Error(ErrorKind::DegenerateLeadingLag, "r(0) is zero");
    return ZeroPairing{scale, {}};
  }
  return pair_roots(find_roots(build_S_poly(r)), scale, rel);
}

/// One root per pair (true picks gamma) plus a global phase alpha.
struct RootSelection {
  ZeroPairing pairing;
  std::vector<bool> choices;
  double alpha = 0.0;
};

inline std::vector<cplx> selected_roots(const ZeroPairing& pairing, const std::vector<bool>& choices) {
  if (choices.size() != pairing.pairs.size()) {
    throw Error(ErrorKind::InvalidArgument, "choice count " + std::to_string(choices.size()) +
                                                " does not match pair count " + std::to_string(pairing.pairs.size()));
  }
  std::vector<cplx> beta(choices.size());
  for (std::size_t k = 0; k < choices.size(); ++k) {
    beta[k] = choices[k] ? pairing.pairs[k].gamma : pairing.pairs[k].gamma_recip;
  }
  return beta;
}

/// Expands X(z) = z^{-N+1} e^{i alpha} c prod (z - beta_n) into x(0..N-1),
/// with c = |r(N-1)|^{1/2} prod |beta_n|^{-1/2}.
inline ComplexSignal signal_from_selection(const ZeroPairing& pairing, const std::vector<bool>& choices,
                                           double alpha) {
  const auto beta = selected_roots(pairing, choices);
  // poly holds prod (z - beta) in descending powers, so poly[k] multiplies z^{N-1-k}.
  std::vector<cplx> poly{1.0};
  poly.reserve(beta.size() + 1);
  double c = std::sqrt(std::abs(pairing.scale));
  for (const auto& b : beta) {
    poly.push_back({});
    for (std::size_t k = poly.size() - 1; k > 0; --k) poly[k] -= b * poly[k - 1];
    c /= std::sqrt(std::abs(b));
  }
  const cplx lead = std::polar(c, alpha);
  for (auto& v : poly) v *= lead;
  return ComplexSignal(std::move(poly));
}

inline ComplexSignal signal_from_selection(const RootSelection& sel) {
  return signal_from_selection(sel.pairing, sel.choices, sel.alpha);
}

}  // namespace fprlab
