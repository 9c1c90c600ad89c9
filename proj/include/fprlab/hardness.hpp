#pragma once

// Product Partition -> Fourier phase retrieval. A Product Partition instance
// u_1..u_N asks for an index set G within {1..N-1} with
//     prod_{k in G} u_k = u_N * prod_{k not in G} u_k.
// The reduction builds the intensity whose zero pairs are (-u_k, -1/u_k) and
// whose anchor is x(0) = u_max^{N-1}; a solution signal with that anchor exists
// exactly when G exists, and its roots reveal G.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "fprlab/error.hpp"
#include "fprlab/signal.hpp"
#include "fprlab/solvers.hpp"
#include "fprlab/ztransform.hpp"

namespace fprlab {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline constexpr std::size_t kMaxBruteForceN = 26;

/// Product Partition input u_1..u_N (N >= 2, every u_k >= 2, max u_k >= 3).
class PPInstance {
 public:
  explicit PPInstance(std::vector<std::int64_t> u) : u_(std::move(u)) {
    if (u_.size() < 2) {
      throw Error(ErrorKind::InvalidInstance, "need at least two integers, got " + std::to_string(u_.size()));
    }
    for (const auto v : u_) {
      if (v < 2) throw Error(ErrorKind::InvalidInstance, "every integer must be >= 2, got " + std::to_string(v));
    }
    if (*std::max_element(u_.begin(), u_.end()) < 3) {
      throw Error(ErrorKind::InvalidInstance,
                  "largest integer must be >= 3; an all-2 instance can be rescaled (e.g. replace every 2 by 4)");
    }
  }

  /// Sub-instances produced while the decision loop removes
  /// duplicates; only u_k >= 2 and N >= 2 are required.
  static PPInstance unchecked(std::vector<std::int64_t> u) {
    PPInstance p;
    p.u_ = std::move(u);
    return p;
  }

  std::size_t size() const noexcept { return u_.size(); }
  const std::vector<std::int64_t>& values() const noexcept { return u_; }
  /// u_k with 1-based k.
  std::int64_t operator[](std::size_t k) const { return u_.at(k - 1); }
  std::int64_t last() const { return u_.back(); }

  /// max(u_1..u_{N-1}); the construction's anchor base.
  std::int64_t u_max() const { return *std::max_element(u_.begin(), u_.end() - 1); }

 private:
  PPInstance() = default;
  std::vector<std::int64_t> u_;
};

enum class PPAnswer { HasSolution, NoSolution };

inline const char* to_string(PPAnswer a) noexcept {
  return a == PPAnswer::HasSolution ? "has a solution" : "no solution";
}

struct PPDecision {
  PPAnswer answer = PPAnswer::NoSolution;
  std::optional<std::vector<std::size_t>> witness;                // 1-based indices into u_1..u_{N-1}
  std::vector<std::pair<std::size_t, std::size_t>> removed_pairs;  // duplicate indices removed by recursion
};

inline BigInt product_of(const PPInstance& pp, const std::vector<std::size_t>& indices) {
  BigInt p = 1;
  for (const auto k : indices) p *= pp[k];
  return p;
}

/// prod_G u = u_N prod_{G^c} u over k in 1..N-1, in exact integers.
inline bool satisfies_partition(const PPInstance& pp, const std::vector<std::size_t>& gamma) {
  std::vector<bool> in(pp.size(), false);
  for (const auto k : gamma) {
    if (k < 1 || k >= pp.size() || in[k]) return false;
    in[k] = true;
  }
  BigInt lhs = 1;
  BigInt rhs = pp.last();
  for (std::size_t k = 1; k < pp.size(); ++k) (in[k] ? lhs : rhs) *= pp[k];
  return lhs == rhs;
}

/// Exhaustive search over subsets of {1..N-1} in increasing bitmask order.
inline PPDecision brute_force_pp(const PPInstance& pp, std::size_t max_n = kMaxBruteForceN) {
  if (pp.size() > max_n) {
    throw Error(ErrorKind::BudgetExceeded, "brute force supports N <= " + std::to_string(max_n));
  }
  const std::size_t free = pp.size() - 1;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << free); ++mask) {
    BigInt lhs = 1;
    BigInt rhs = pp.last();
    std::vector<std::size_t> gamma;
    for (std::size_t b = 0; b < free; ++b) {
      if ((mask >> b) & 1u) {
        lhs *= pp[b + 1];
        gamma.push_back(b + 1);
      } else {
        rhs *= pp[b + 1];
      }
    }
    if (lhs == rhs) return PPDecision{PPAnswer::HasSolution, std::move(gamma), {}};
  }
  return PPDecision{PPAnswer::NoSolution, std::nullopt, {}};
}

/// The adversarial instance, exactly and in floating point.
struct HardInstance {
  PPInstance pp;
  BigInt anchor_exact;  // u_max^{N-1}
  BigInt scale_exact;   // r(N-1) = anchor^2 * u_N
  std::vector<std::pair<Rational, Rational>> pairs_exact;  // (-u_k, -1/u_k)
  PRInstance pr;
};

inline BigInt pow_int(std::int64_t base, std::size_t e) {
  BigInt out = 1;
  for (std::size_t i = 0; i < e; ++i) out *= base;
  return out;
}

inline constexpr std::uint64_t kFloatExactLimit = std::uint64_t{1} << 52;

/// Anchor u_max^{N-1}, zero pairs (-u_k, -1/u_k) for k < N, r(N-1) = |x(0)|^2 u_N.
/// The floating-point instance requires u_max^{2N} <= 2^52.
inline HardInstance construct_hard_instance(const PPInstance& pp, std::size_t grid_mult = 4) {
  const std::size_t n = pp.size();
  const auto umax = pp.u_max();
  if (pow_int(umax, 2 * n) > BigInt(kFloatExactLimit)) {
    throw Error(ErrorKind::OverflowBeyondPrecision,
                "u_max^{2N} = " + pow_int(umax, 2 * n).str() + " exceeds 2^52; use the exact fields only");
  }
  BigInt anchor = pow_int(umax, n - 1);
  BigInt scale = anchor * anchor * pp.last();
  std::vector<std::pair<Rational, Rational>> exact;
  ZeroPairing pairing{cplx(scale.convert_to<double>(), 0.0), {}};
  for (std::size_t k = 1; k < n; ++k) {
    const auto u = pp[k];
    exact.emplace_back(Rational(-u), Rational(-1, u));
    pairing.pairs.push_back({cplx(-static_cast<double>(u), 0.0), cplx(-1.0 / static_cast<double>(u), 0.0), false});
  }
  auto pr = make_instance(std::move(pairing), cplx(anchor.convert_to<double>(), 0.0), grid_mult);
  return HardInstance{pp, std::move(anchor), std::move(scale), std::move(exact), std::move(pr)};
}

/// A real signal with exact rational entries.
struct ExactSignal {
  std::vector<Rational> entries;

  std::size_t size() const noexcept { return entries.size(); }

  ComplexSignal to_complex() const {
    std::vector<cplx> out(entries.size());
    for (std::size_t k = 0; k < entries.size(); ++k) out[k] = cplx(entries[k].convert_to<double>(), 0.0);
    return ComplexSignal(std::move(out));
  }

  /// X(z) = sum_k x(k) z^{-k}, z != 0.
  Rational eval(const Rational& z) const {
    const Rational w = 1 / z;
    Rational acc = 0;
    for (std::size_t k = entries.size(); k-- > 0;) acc = acc * w + entries[k];
    return acc;
  }

  /// r(N-1) = conj(x(0)) x(N-1).
  Rational last_lag() const { return entries.front() * entries.back(); }
};

/// beta_k = -u_k for k in G, -1/u_k otherwise (k = 1..N-1).
inline std::vector<Rational> witness_roots(const PPInstance& pp, const std::vector<std::size_t>& gamma) {
  std::vector<Rational> beta(pp.size() - 1);
  std::vector<bool> in(pp.size(), false);
  for (const auto k : gamma) in.at(k) = true;
  for (std::size_t k = 1; k < pp.size(); ++k) beta[k - 1] = in[k] ? Rational(-pp[k]) : Rational(-1, pp[k]);
  return beta;
}

/// x(0) z^{-(N-1)} prod (z - beta_k), expanded exactly.
inline ExactSignal ground_truth_signal(const PPInstance& pp, const std::vector<std::size_t>& gamma) {
  if (!satisfies_partition(pp, gamma)) {
    throw Error(ErrorKind::InvalidWitness, "index set does not satisfy prod_G u = u_N prod_{G^c} u");
  }
  const Rational x0 = Rational(pow_int(pp.u_max(), pp.size() - 1));
  std::vector<Rational> poly{Rational(1)};
  for (const auto& b : witness_roots(pp, gamma)) {
    poly.emplace_back(0);
    for (std::size_t k = poly.size() - 1; k > 0; --k) poly[k] -= b * poly[k - 1];
  }
  for (auto& v : poly) v *= x0;
  return ExactSignal{std::move(poly)};
}

enum class Verdict { SelectGamma, SelectRecip, BothRoots };

inline const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::SelectGamma: return "gamma";
    case Verdict::SelectRecip: return "recip";
    case Verdict::BothRoots: return "both";
  }
  return "?";
}

struct DiscriminationResult {
  Verdict verdict;
  double at_root;   // |X_m(-u_k)|
  double at_recip;  // |X_m(-1/u_k)|
  double c0;        // 1 - 2 u_max^{-N}
};

inline constexpr double kBothRootsThreshold = 0.25;
inline constexpr double kSelectionGap = 0.75;

inline double discrimination_constant(std::int64_t u_max, std::size_t n) {
  return 1.0 - 2.0 * std::pow(static_cast<double>(u_max), -static_cast<double>(n));
}

/// Decides which member of the pair (-u_k, -1/u_k) the iterate's Z-transform
/// vanishes at: both when max(a, b) <= 1/4, -u_k when b >= a + 3/4.
inline DiscriminationResult discriminate(const ComplexSignal& xm, std::int64_t uk, std::int64_t u_max, std::size_t n) {
  if (uk < 2) throw Error(ErrorKind::InvalidArgument, "u_k must be >= 2");
  const double u = static_cast<double>(uk);
  const double a = std::abs(eval_ztransform(xm, cplx(-u, 0.0)));
  const double b = std::abs(eval_ztransform(xm, cplx(-1.0 / u, 0.0)));
  Verdict v;
  if (std::max(a, b) <= kBothRootsThreshold) {
    v = Verdict::BothRoots;
  } else if (b >= a + kSelectionGap) {
    v = Verdict::SelectGamma;
  } else {
    v = Verdict::SelectRecip;
  }
  return DiscriminationResult{v, a, b, discrimination_constant(u_max, n)};
}

struct BoundIndexReport {
  std::size_t k;             // 1-based
  bool double_root;          // 1/beta_k is also a zero of X
  double at_beta;            // |X_m(beta_k)|
  double at_inverse;         // |X_m(1/beta_k)|
  double margin;             // (i): at_inverse - at_beta - c0; (ii): cap - max(at_beta, at_inverse)
  bool holds;
};

struct BoundReport {
  double c0;
  double cap;  // u_max^{-N}
  std::vector<BoundIndexReport> indices;

  bool all_hold() const {
    return std::all_of(indices.begin(), indices.end(), [](const BoundIndexReport& r) { return r.holds; });
  }
};

/// Checks the discrimination bounds at x_m = x + perturbation, where x is the
/// exact witness signal and ||perturbation|| <= u_max^{-2N}:
///   (i)  |X_m(1/beta_k)| >= |X_m(beta_k)| + c0   when 1/beta_k is not a zero of X,
///   (ii) max(|X_m(beta_k)|, |X_m(1/beta_k)|) <= u_max^{-N} otherwise.
/// X is evaluated in exact arithmetic and only the perturbation's transform in
/// floating point, so cancellation in X does not pollute the margins.
inline BoundReport check_lemma_bounds(const PPInstance& pp, const std::vector<std::size_t>& gamma,
                                      const ComplexSignal& perturbation) {
  const std::size_t n = pp.size();
  if (perturbation.size() != n) {
    throw Error(ErrorKind::InvalidArgument, "perturbation must have length N");
  }
  const double umax = static_cast<double>(pp.u_max());
  const double radius = std::pow(umax, -2.0 * static_cast<double>(n));
  if (norm2(perturbation) > radius * (1.0 + 1e-12)) {
    throw Error(ErrorKind::HypothesisViolated, "perturbation norm exceeds u_max^{-2N}");
  }
  const auto x = ground_truth_signal(pp, gamma);
  const auto beta = witness_roots(pp, gamma);

  BoundReport report{discrimination_constant(pp.u_max(), n), std::pow(umax, -static_cast<double>(n)), {}};
  auto xm_at = [&](const Rational& z) {
    const double exact = x.eval(z).convert_to<double>();
    return std::abs(cplx(exact, 0.0) + eval_ztransform(perturbation, cplx(z.convert_to<double>(), 0.0)));
  };
  for (std::size_t k = 1; k < n; ++k) {
    const Rational& b = beta[k - 1];
    const Rational inv = 1 / b;
    bool double_root = false;
    for (std::size_t j = 0; j < beta.size(); ++j) {
      if (j != k - 1 && beta[j] == inv) double_root = true;
    }
    const double at_beta = xm_at(b);
    const double at_inverse = xm_at(inv);
    BoundIndexReport r{k, double_root, at_beta, at_inverse, 0.0, false};
    if (double_root) {
      r.margin = report.cap - std::max(at_beta, at_inverse);
    } else {
      r.margin = at_inverse - at_beta - report.c0;
    }
    r.holds = r.margin >= 0.0;
    report.indices.push_back(r);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Decision loop
// ---------------------------------------------------------------------------

struct DecideOptions {
  SolverConfig solver;
  std::optional<std::size_t> iterations;  // default: reduction_budget(N, u_max) per round
  std::size_t grid_mult = 4;
};

struct DecisionRound {
  std::vector<std::size_t> indices;  // surviving original indices, in order
  std::int64_t u_max = 0;
  std::vector<DiscriminationResult> results;  // one per examined index, up to an early exit
  bool solver_infeasible = false;
};

struct DecisionTrace {
  PPDecision decision;
  std::vector<DecisionRound> rounds;
  std::optional<Rational> quot;
};

/// Runs the reduction loop with `solve` standing in for the phase retrieval
/// algorithm:
///  1. build the hard instance on the surviving indices U and run the solver;
///  2. classify every pair of U from the final iterate;
///  3. a pair vanishing at both roots means a duplicate value split across
///     the partition: remove it together with its smallest-index duplicate and
///     restart, or report a solution when no duplicate exists;
///  4. otherwise compare quot = prod_{G1} u / prod_{G2} u with u_N exactly.
/// A solver that certifies infeasibility (the exact oracle) ends the loop with
/// NoSolution.
template <class Solver>
DecisionTrace decide_pp_traced(const PPInstance& pp, Solver&& solve, const DecideOptions& opts = {}) {
  std::vector<std::size_t> surviving;
  for (std::size_t k = 1; k < pp.size(); ++k) surviving.push_back(k);
  const std::int64_t un = pp.last();

  DecisionTrace out;
  while (!surviving.empty()) {
    std::vector<std::int64_t> values;
    for (const auto k : surviving) values.push_back(pp[k]);
    values.push_back(un);
    const auto sub = PPInstance::unchecked(std::move(values));
    const auto hard = construct_hard_instance(sub, opts.grid_mult);

    DecisionRound round{surviving, sub.u_max(), {}, false};
    SolverConfig cfg = opts.solver;
    cfg.max_iters = opts.iterations.value_or(reduction_budget(sub.size(), sub.u_max()));

    std::optional<IterateTrace> trace;
    try {
      trace = solve(hard.pr, cfg);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoFeasibleSolution) throw;
      round.solver_infeasible = true;
      out.rounds.push_back(std::move(round));
      out.decision = PPDecision{PPAnswer::NoSolution, std::nullopt, out.decision.removed_pairs};
      return out;
    }
    if (trace->iterates.empty()) throw Error(ErrorKind::SolverFailure, "solver returned no iterate");
    const ComplexSignal& xm = trace->iterates.back();

    std::vector<std::size_t> g1;
    std::vector<std::size_t> g2;
    bool restarted = false;
    for (std::size_t j = 0; j < surviving.size(); ++j) {
      const std::size_t kj = surviving[j];
      const auto res = discriminate(xm, pp[kj], sub.u_max(), sub.size());
      round.results.push_back(res);
      if (res.verdict == Verdict::BothRoots) {
        std::optional<std::size_t> dup;
        for (std::size_t l = 0; l < surviving.size(); ++l) {
          if (l != j && pp[surviving[l]] == pp[kj]) {
            dup = l;
            break;
          }
        }
        out.rounds.push_back(round);
        if (!dup) {
          out.decision = PPDecision{PPAnswer::HasSolution, std::nullopt, out.decision.removed_pairs};
          return out;
        }
        out.decision.removed_pairs.emplace_back(kj, surviving[*dup]);
        const std::size_t kl = surviving[*dup];
        std::erase_if(surviving, [&](std::size_t k) { return k == kj || k == kl; });
        restarted = true;
        break;
      }
      (res.verdict == Verdict::SelectGamma ? g1 : g2).push_back(kj);
    }
    if (restarted) continue;
    out.rounds.push_back(std::move(round));

    const Rational quot = Rational(product_of(pp, g1), product_of(pp, g2));
    out.quot = quot;
    if (quot == Rational(un)) {
      std::vector<std::size_t> witness = g1;
      for (const auto& [kj, kl] : out.decision.removed_pairs) witness.push_back(kj);
      std::sort(witness.begin(), witness.end());
      out.decision = PPDecision{PPAnswer::HasSolution, std::move(witness), out.decision.removed_pairs};
    } else {
      out.decision = PPDecision{PPAnswer::NoSolution, std::nullopt, out.decision.removed_pairs};
    }
    return out;
  }
  // Every index was removed in duplicate pairs: prod over empty sets gives 1 != u_N.
  out.decision = PPDecision{PPAnswer::NoSolution, std::nullopt, out.decision.removed_pairs};
  return out;
}

template <class Solver>
PPDecision decide_pp(const PPInstance& pp, Solver&& solve, const DecideOptions& opts = {}) {
  return decide_pp_traced(pp, std::forward<Solver>(solve), opts).decision;
}

/// Random instance with a planted partition: u_1..u_{N-1} drawn from
/// [2, u_hi], G drawn uniformly, redrawn until u_N = prod_G u / prod_{G^c} u
/// is an integer >= 2 and max(u_1..u_{N-1}) >= 3.
inline std::pair<PPInstance, std::vector<std::size_t>> planted_instance(std::size_t n, std::int64_t u_hi,
                                                                        std::mt19937_64& rng) {
  if (n < 2 || u_hi < 3) throw Error(ErrorKind::InvalidArgument, "planted instances need N >= 2 and u_hi >= 3");
  std::uniform_int_distribution<std::int64_t> draw(2, u_hi);
  std::bernoulli_distribution coin(0.5);
  for (;;) {
    std::vector<std::int64_t> u(n - 1);
    for (auto& v : u) v = draw(rng);
    std::vector<std::size_t> gamma;
    BigInt num = 1;
    BigInt den = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      if (coin(rng)) {
        gamma.push_back(k + 1);
        num *= u[k];
      } else {
        den *= u[k];
      }
    }
    if (num % den != 0) continue;
    const BigInt last = num / den;
    if (last < 2 || last > BigInt(u_hi * u_hi)) continue;
    const auto umax = *std::max_element(u.begin(), u.end());
    if (umax < 3 || pow_int(umax, 2 * n) > BigInt(kFloatExactLimit)) continue;
    u.push_back(last.convert_to<std::int64_t>());
    return {PPInstance(std::move(u)), std::move(gamma)};
  }
}

}  // namespace fprlab
