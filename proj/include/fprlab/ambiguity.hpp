#pragma once

// Enumeration of every signal sharing a Fourier intensity, the trivial
// ambiguity quotient, and the x(0) anchor that singles out one solution.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fprlab/error.hpp"
#include "fprlab/parallel.hpp"
#include "fprlab/signal.hpp"
#include "fprlab/ztransform.hpp"

namespace fprlab {

inline constexpr std::size_t kMaxEnumeratedPairs = 24;
inline constexpr double kCanonicalRounding = 1e-9;
inline constexpr double kAnchorTol = 1e-6;

/// Choice vector for an enumeration index: bit k set means pair k takes
/// gamma_recip, so index 0 selects every gamma.
inline std::vector<bool> choices_from_index(std::uint64_t index, std::size_t pairs) {
  std::vector<bool> out(pairs);
  for (std::size_t k = 0; k < pairs; ++k) out[k] = ((index >> k) & 1u) == 0;
  return out;
}

inline std::uint64_t index_from_choices(const std::vector<bool>& choices) {
  std::uint64_t index = 0;
  for (std::size_t k = 0; k < choices.size(); ++k) {
    if (!choices[k]) index |= std::uint64_t{1} << k;
  }
  return index;
}

struct Solution {
  std::uint64_t index = 0;
  std::vector<bool> choices;
  double alpha = 0.0;
  ComplexSignal signal;
};

struct SolutionSet {
  ZeroPairing pairing;
  std::vector<Solution> solutions;
  bool canonical = false;
};

/// One signal per choice vector, in choice-index order.
inline SolutionSet enumerate_solutions(const ZeroPairing& pairing, double alpha = 0.0,
                                       std::size_t max_pairs = kMaxEnumeratedPairs) {
  const std::size_t pairs = pairing.pairs.size();
  if (pairs > max_pairs) {
    throw Error(ErrorKind::EnumerationBudgetExceeded,
                std::to_string(pairs) + " root pairs exceed the enumeration budget of " + std::to_string(max_pairs));
  }
  const std::uint64_t count = std::uint64_t{1} << pairs;
  std::vector<std::optional<Solution>> slots(count);
  auto build = [&](std::size_t i) {
    auto choices = choices_from_index(i, pairs);
    auto x = signal_from_selection(pairing, choices, alpha);
    slots[i].emplace(Solution{i, std::move(choices), alpha, std::move(x)});
  };
  parallel_for(count, build, count >= 4096 ? worker_count() : 1u);

  SolutionSet set{pairing, {}, false};
  set.solutions.reserve(count);
  for (auto& s : slots) set.solutions.push_back(std::move(*s));
  return set;
}

namespace detail {

inline std::optional<std::pair<std::size_t, std::size_t>> support_bounds(const ComplexSignal& x) {
  std::size_t lo = 0;
  while (lo < x.size() && x[lo] == cplx{}) ++lo;
  if (lo == x.size()) return std::nullopt;
  std::size_t hi = x.size() - 1;
  while (x[hi] == cplx{}) --hi;
  return std::pair{lo, hi};
}

inline ComplexSignal stripped(const ComplexSignal& x) {
  const auto b = support_bounds(x);
  if (!b) throw Error(ErrorKind::ZeroSignal, "signal has no nonzero entry");
  return ComplexSignal(std::vector<cplx>(x.begin() + static_cast<long>(b->first),
                                         x.begin() + static_cast<long>(b->second) + 1));
}

// Rotate so that x(0) (nonzero after stripping) is real positive.
inline ComplexSignal phase_fixed(const ComplexSignal& x) {
  const cplx rot = std::conj(x[0]) / std::abs(x[0]);
  auto y = scaled(x, rot);
  y[0] = cplx(std::abs(x[0]), 0.0);
  return y;
}

inline double round_to(double v, double step) { return std::round(v / step) * step; }

}  // namespace detail

/// Entries rounded to the canonical grid; equal keys mean equal canonical forms.
inline std::vector<std::pair<double, double>> canonical_key(const ComplexSignal& x,
                                                           double step = kCanonicalRounding) {
  std::vector<std::pair<double, double>> key(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    // + 0.0 folds -0 into +0.
    key[k] = {detail::round_to(x[k].real(), step) + 0.0, detail::round_to(x[k].imag(), step) + 0.0};
  }
  return key;
}

/// Representative of the trivial-ambiguity orbit: zero padding stripped,
/// first entry real positive, then the (re, im)-lexicographically smaller of
/// the signal and its conjugate reflection.
inline ComplexSignal canonicalize(const ComplexSignal& x, double step = kCanonicalRounding) {
  const auto s = detail::stripped(x);
  auto direct = detail::phase_fixed(s);
  auto reflected = detail::phase_fixed(conj_reflect(s));
  return canonical_key(reflected, step) < canonical_key(direct, step) ? reflected : direct;
}

namespace detail {

// min over phi of ||a - e^{i phi} b||.
inline double phase_aligned_distance(const ComplexSignal& a, const ComplexSignal& b) {
  cplx inner{};
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    inner += std::conj(b[k]) * a[k];
    na += std::norm(a[k]);
    nb += std::norm(b[k]);
  }
  return std::sqrt(std::max(0.0, na + nb - 2.0 * std::abs(inner)));
}

}  // namespace detail

/// True when a and b differ only by shift, global phase, and conjugate
/// reflection, up to rel_tol relative to the larger norm. Unlike comparing
/// canonical keys, this has no rounding-boundary effects.
inline bool same_up_to_trivial(const ComplexSignal& a, const ComplexSignal& b, double rel_tol) {
  const auto sa = detail::stripped(a);
  const auto sb = detail::stripped(b);
  if (sa.size() != sb.size()) return false;
  const double bound = rel_tol * std::max(norm2(sa), norm2(sb));
  return detail::phase_aligned_distance(sa, sb) <= bound ||
         detail::phase_aligned_distance(sa, conj_reflect(sb)) <= bound;
}

/// Number of trivial-ambiguity classes among the signals (greedy clustering).
inline std::size_t count_distinct_up_to_trivial(const std::vector<ComplexSignal>& signals, double rel_tol) {
  std::vector<const ComplexSignal*> reps;
  for (const auto& x : signals) {
    const bool seen = std::any_of(reps.begin(), reps.end(),
                                  [&](const ComplexSignal* r) { return same_up_to_trivial(*r, x, rel_tol); });
    if (!seen) reps.push_back(&x);
  }
  return reps.size();
}

/// Distinct canonical representatives of a solution set.
inline SolutionSet canonicalized(const SolutionSet& set, double rel_tol = 1e-7) {
  SolutionSet out{set.pairing, {}, true};
  for (const auto& s : set.solutions) {
    const bool seen = std::any_of(out.solutions.begin(), out.solutions.end(), [&](const Solution& r) {
      return same_up_to_trivial(r.signal, s.signal, rel_tol);
    });
    if (!seen) out.solutions.push_back(Solution{s.index, s.choices, s.alpha, canonicalize(s.signal)});
  }
  return out;
}

/// |prod(-beta) - r(N-1)/|x0|^2|; vanishes for selections consistent with x(0) = x0.
inline double product_constraint(const ZeroPairing& pairing, const std::vector<bool>& choices, cplx x0) {
  if (x0 == cplx{}) throw Error(ErrorKind::ZeroAnchor, "anchor x0 must be nonzero");
  cplx prod = 1.0;
  for (const auto& b : selected_roots(pairing, choices)) prod *= -b;
  return std::abs(prod - pairing.scale / std::norm(x0));
}

inline double product_constraint(const RootSelection& sel, cplx x0) {
  return product_constraint(sel.pairing, sel.choices, x0);
}

/// Keeps the selections whose product-constraint residual is at most
/// tol * |r(N-1)| / |x0|^2 and re-expands them with alpha = arg(x0). Every
/// survivor is returned when there is more than one.
inline SolutionSet filter_by_anchor(const SolutionSet& set, cplx x0, double tol = kAnchorTol) {
  if (x0 == cplx{}) throw Error(ErrorKind::ZeroAnchor, "anchor x0 must be nonzero");
  const double threshold = tol * std::abs(set.pairing.scale) / std::norm(x0);
  const double alpha = std::arg(x0);
  SolutionSet out{set.pairing, {}, false};
  for (const auto& s : set.solutions) {
    if (product_constraint(set.pairing, s.choices, x0) <= threshold) {
      out.solutions.push_back(Solution{s.index, s.choices, alpha, signal_from_selection(set.pairing, s.choices, alpha)});
    }
  }
  if (out.solutions.empty()) {
    throw Error(ErrorKind::NoFeasibleSolution, "no root selection satisfies the product constraint for this anchor");
  }
  return out;
}

}  // namespace fprlab
