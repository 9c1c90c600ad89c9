// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "fprlab_cli.hpp"
#include "support.hpp"

using namespace fprlab;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome v{false, ""};
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = limit_s <= 0.0 || secs < limit_s;
  const bool pass = v.pass && in_time;
  if (!pass) ++failures;
  std::printf("%s [%d] %s: %s (%.2f s%s)\n", pass ? "PASS" : "FAIL", id, name, v.detail.c_str(), secs,
              in_time ? "" : ", over time limit");
  std::fflush(stdout);
}

// Coincidence-rejected random signal of length n together with its pairing.
std::pair<ComplexSignal, ZeroPairing> generic_draw(std::size_t n, std::mt19937_64& rng, std::size_t& rejected) {
  for (;;) {
    auto x = test::random_signal(n, rng);
    try {
      auto p = pairing_from_autocorr(autocorrelation(x));
      if (test::is_generic(p)) return {std::move(x), std::move(p)};
    } catch (const Error&) {
    }
    ++rejected;
  }
}

std::vector<std::vector<std::int64_t>> sweep_instances(std::size_t n) {
  std::vector<std::vector<std::int64_t>> out;
  std::vector<std::int64_t> u(n, 2);
  for (;;) {
    if (*std::max_element(u.begin(), u.end()) >= 3) out.push_back(u);
    std::size_t k = 0;
    while (k < n && u[k] == 6) u[k++] = 2;
    if (k == n) break;
    ++u[k];
  }
  return out;
}

}  // namespace

int main() {
  criterion(1, "ambiguity cardinality", 10.0, [] {
    std::mt19937_64 rng(1001);
    std::size_t bad = 0;
    std::size_t rejected = 0;
    for (std::size_t n = 3; n <= 8; ++n) {
      for (int t = 0; t < 50; ++t) {
        const auto [x, p] = generic_draw(n, rng, rejected);
        const auto set = enumerate_solutions(p);
        const auto grid = uniform_grid(4 * n);
        const auto target = fourier_intensity(x, grid);
        const double peak = *std::max_element(target.values.begin(), target.values.end());
        bool ok = set.solutions.size() == (std::size_t{1} << (n - 1));
        std::vector<ComplexSignal> signals;
        for (const auto& s : set.solutions) {
          const auto got = fourier_intensity(s.signal, grid);
          for (std::size_t j = 0; j < grid.size(); ++j) ok = ok && std::abs(got.values[j] - target.values[j]) <= 1e-7 * peak;
          signals.push_back(s.signal);
        }
        ok = ok && count_distinct_up_to_trivial(signals, 1e-7) == (std::size_t{1} << (n - 2));
        ok = ok && canonicalized(set).solutions.size() == (std::size_t{1} << (n - 2));
        if (!ok) ++bad;
      }
    }
    return Outcome{bad == 0, "300 signals, N = 3..8, " + std::to_string(bad) + " mismatches, " +
                                 std::to_string(rejected) + " draws rejected"};
  });

  criterion(2, "root pairing", 5.0, [] {
    std::mt19937_64 rng(1002);
    std::size_t bad = 0;
    std::size_t rejected = 0;
    for (std::size_t n = 3; n <= 8; ++n) {
      for (int t = 0; t < 50; ++t) {
        const auto [x, p] = generic_draw(n, rng, rejected);
        for (const auto& pr : p.pairs) {
          if (pair_residual(pr.gamma, pr.gamma_recip) > kPairTol * std::max(1.0, std::norm(pr.gamma))) ++bad;
        }
      }
    }
    // Planted factor (1, -e^{i theta}) puts one root of X, hence a double root of S, on the circle.
    std::size_t odd = 0;
    for (int t = 0; t < 100; ++t) {
      const auto base = test::random_signal(3 + t % 5, rng);
      const std::size_t planted = 1 + t % 2;
      std::vector<cplx> x(base.vec());
      for (std::size_t q = 0; q < planted; ++q) {
        const cplx c = std::polar(1.0, 0.7 * t + 2.1 * q);
        std::vector<cplx> y(x.size() + 1);
        for (std::size_t k = 0; k < x.size(); ++k) {
          y[k] += x[k];
          y[k + 1] -= c * x[k];
        }
        x = y;
      }
      const auto r = autocorrelation(ComplexSignal(x));
      const auto roots = find_roots(build_S_poly(r));
      const auto on_circle = std::count_if(roots.begin(), roots.end(),
                                           [](cplx z) { return std::abs(std::abs(z) - 1.0) < 1e-4; });
      const auto p = pairing_from_autocorr(r);
      const auto flagged = static_cast<std::size_t>(
          std::count_if(p.pairs.begin(), p.pairs.end(), [](const RootPair& pr) { return pr.unit_circle; }));
      if (on_circle % 2 != 0 || flagged != planted || static_cast<std::size_t>(on_circle) != 2 * planted) ++odd;
    }
    return Outcome{bad == 0 && odd == 0, std::to_string(bad) + " pair identity violations, " + std::to_string(odd) +
                                             "/100 planted unit-circle cases with wrong multiplicity"};
  });

  criterion(3, "anchor uniqueness", 10.0, [] {
    std::mt19937_64 rng(1003);
    std::size_t unique = 0;
    std::size_t off = 0;
    std::size_t rejected = 0;
    for (int t = 0; t < 500; ++t) {
      const auto [x, p] = generic_draw(3 + static_cast<std::size_t>(t % 6), rng, rejected);
      const auto survivors = filter_by_anchor(enumerate_solutions(p), x[0]);
      if (survivors.solutions.size() == 1) {
        ++unique;
        if (distance(survivors.solutions[0].signal, x) > 1e-7 * norm2(x)) ++off;
      }
    }
    return Outcome{unique >= 495 && off == 0, std::to_string(unique) + "/500 unique survivors, " + std::to_string(off) +
                                                  " farther than 1e-7 from the truth"};
  });

  std::vector<std::vector<std::int64_t>> sweep;
  for (std::size_t n = 3; n <= 5; ++n) {
    for (auto& u : sweep_instances(n)) sweep.push_back(std::move(u));
  }

  criterion(4, "reduction agreement", 60.0, [&] {
    std::size_t disagree = 0;
    std::size_t recursions = 0;
    for (const auto& u : sweep) {
      const PPInstance pp(u);
      const auto truth = brute_force_pp(pp);
      const auto got = decide_pp(pp, oracle_solve);
      if (got.answer != truth.answer) ++disagree;
      if (got.witness && !satisfies_partition(pp, *got.witness)) ++disagree;
      if (!got.removed_pairs.empty()) ++recursions;
    }
    return Outcome{disagree == 0, std::to_string(sweep.size()) + " instances, " + std::to_string(disagree) +
                                      " disagreements, " + std::to_string(recursions) + " with duplicate removal"};
  });

  criterion(5, "construction identities", 0.0, [&] {
    std::size_t bad = 0;
    std::size_t witnessed = 0;
    for (const auto& u : sweep) {
      const PPInstance pp(u);
      const auto hard = construct_hard_instance(pp);
      const std::size_t n = pp.size();
      if (hard.scale_exact != pow_int(pp.u_max(), 2 * (n - 1)) * pp.last()) ++bad;
      const Rational ratio(hard.scale_exact, hard.anchor_exact * hard.anchor_exact);
      if (ratio != Rational(pp.last())) ++bad;
      const auto truth = brute_force_pp(pp);
      if (!truth.witness) continue;
      ++witnessed;
      const auto x = ground_truth_signal(pp, *truth.witness);
      Rational prod = 1;
      for (const auto& b : witness_roots(pp, *truth.witness)) prod *= -b;
      if (prod != ratio || x.entries.back() / x.entries.front() != prod || x.last_lag() != Rational(hard.scale_exact)) {
        ++bad;
      }
    }
    return Outcome{bad == 0, std::to_string(sweep.size()) + " instances (" + std::to_string(witnessed) +
                                 " with witnesses), " + std::to_string(bad) + " violated identities"};
  });

  criterion(6, "discrimination bounds", 30.0, [] {
    std::mt19937_64 rng(1006);
    std::uniform_real_distribution<double> frac(0.0, 1.0);
    std::size_t violations = 0;
    std::size_t checks = 0;
    double min_margin_i = 1e300;
    double min_margin_ii = 1e300;
    for (int inst = 0; inst < 20; ++inst) {
      const auto [pp, gamma] = planted_instance(3 + static_cast<std::size_t>(inst % 4), 6, rng);
      const double radius = std::pow(static_cast<double>(pp.u_max()), -2.0 * static_cast<double>(pp.size()));
      for (int t = 0; t < 1000; ++t) {
        auto d = test::random_signal(pp.size(), rng);
        // Half the draws sit on the boundary sphere, the rest inside the ball.
        const double rho = t % 2 ? radius : radius * frac(rng);
        d = scaled(d, rho / norm2(d));
        const auto rep = check_lemma_bounds(pp, gamma, d);
        for (const auto& r : rep.indices) {
          ++checks;
          if (!r.holds) ++violations;
          (r.double_root ? min_margin_ii : min_margin_i) = std::min(r.double_root ? min_margin_ii : min_margin_i, r.margin);
        }
      }
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%zu index checks, %zu violations, min margin (i) %.3g, (ii) %.3g", checks,
                  violations, min_margin_i, min_margin_ii == 1e300 ? 0.0 : min_margin_ii);
    return Outcome{violations == 0, buf};
  });

  criterion(7, "solver contracts", 0.0, [] {
    std::mt19937_64 rng(1007);
    std::size_t monotone_bad = 0;
    std::size_t anchor_bad = 0;
    for (int t = 0; t < 50; ++t) {
      const auto x = test::random_signal(3 + static_cast<std::size_t>(t % 6), rng);
      const auto inst = make_instance(pairing_from_autocorr(autocorrelation(x)), x[0]);
      SolverConfig cfg;
      cfg.seed = static_cast<std::uint64_t>(t);
      cfg.max_iters = 500;
      cfg.loss_tol = 0.0;
      const auto er = error_reduction_solve(inst, cfg);
      for (std::size_t i = 1; i < er.losses.size(); ++i) {
        if (er.losses[i] > er.losses[i - 1] + 1e-12 * er.losses[0]) ++monotone_bad;
      }
      for (const auto& name : solver_names()) {
        const auto tr = name == "er" ? er : solver_by_name(name)(inst, cfg);
        for (const auto& z : tr.iterates) {
          if (z[0] != x[0]) ++anchor_bad;
        }
      }
    }
    std::size_t grad_bad = 0;
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
      const std::size_t n = 2 + static_cast<std::size_t>(t % 7);
      const auto s = fourier_intensity(test::random_signal(n, rng), uniform_grid(4 * n));
      const auto z = test::random_signal(n, rng);
      const auto g = intensity_loss_gradient(z, s);
      double num = 0.0;
      double den = 0.0;
      const double h = 1e-6;
      for (std::size_t k = 0; k < n; ++k) {
        for (const cplx dir : {cplx(1.0, 0.0), cplx(0.0, 1.0)}) {
          auto plus = z.vec();
          auto minus = z.vec();
          plus[k] += h * dir;
          minus[k] -= h * dir;
          const double fd = (intensity_loss(ComplexSignal(plus), s) - intensity_loss(ComplexSignal(minus), s)) / (2 * h);
          const double an = dir.real() != 0.0 ? g[k].real() : g[k].imag();
          num += (fd - an) * (fd - an);
          den += an * an;
        }
      }
      const double rel = std::sqrt(num / den);
      worst = std::max(worst, rel);
      if (rel > 1e-5) ++grad_bad;
    }
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "ER monotonicity violations %zu over 50x500 iterations, gradient worst relative error %.2e over 100 "
                  "points, anchor violations %zu",
                  monotone_bad, worst, anchor_bad);
    return Outcome{monotone_bad == 0 && grad_bad == 0 && anchor_bad == 0, buf};
  });

  criterion(8, "hardness exhibit", 0.0, [] {
    cli::BenchOptions o;
    o.suites = {"random", "hard"};
    o.n = 6;
    o.trials = 50;
    o.solvers = {"er", "hio", "wf", "oracle"};
    const auto summary = cli::summarize(cli::run_bench(o));
    bool oracle_ok = true;
    std::ostringstream rates;
    for (const auto& l : summary) {
      if (l.solver == "oracle" && l.rate() != 1.0) oracle_ok = false;
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%s%s/%s %.2f", rates.tellp() ? ", " : "", l.suite.c_str(), l.solver.c_str(),
                    l.rate());
      rates << buf;
    }
    return Outcome{oracle_ok, "recovery rates (n = 6, 50 trials): " + rates.str()};
  });

  std::printf("%s: %d criteria failed\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
