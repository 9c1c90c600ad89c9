#pragma once

// Command-line front end. `run` is separate from main() so tests can drive
// every subcommand in-process and inspect output and exit codes.
//
// Exit codes: 0 success (for `decide`: has a solution), 1 `decide` found no
// solution, 2 any error.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fprlab/fprlab.hpp"

namespace fprlab::cli {

inline std::string num(double v) {
  if (v == 0.0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  return buf;
}

inline std::string num(cplx z) {
  if (z.imag() == 0.0) return num(z.real());
  const std::string im = num(std::abs(z.imag()));
  if (z.real() == 0.0) return (z.imag() < 0 ? "-" : "") + im + "i";
  return num(z.real()) + (z.imag() < 0 ? "-" : "+") + im + "i";
}

inline cplx parse_complex_arg(const std::string& text) {
  std::stringstream ss(text);
  double re = 0.0;
  double im = 0.0;
  char comma = 0;
  if (!(ss >> re)) throw Error(ErrorKind::ParseError, "cannot parse complex number '" + text + "'");
  if (ss >> comma) {
    if (comma != ',' || !(ss >> im)) throw Error(ErrorKind::ParseError, "expected 're,im', got '" + text + "'");
  }
  return {re, im};
}

struct ResultRow {
  std::string instance_id;
  std::string solver;
  std::size_t iterations = 0;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  bool recovered = false;
  double wall_ms = 0.0;
};

inline nlohmann::json row_to_json(const ResultRow& r) {
  return {{"instance", r.instance_id},   {"solver", r.solver},         {"iterations", r.iterations},
          {"initial_loss", r.initial_loss}, {"final_loss", r.final_loss}, {"recovered", r.recovered},
          {"wall_ms", r.wall_ms}};
}

inline constexpr double kRecoveryTol = 1e-6;

inline bool recovered(const ComplexSignal& x, const std::vector<ComplexSignal>& references) {
  return std::any_of(references.begin(), references.end(),
                     [&](const ComplexSignal& r) { return same_up_to_trivial(x, r, kRecoveryTol); });
}

/// Runs one solver and scores the final iterate against the reference set.
inline ResultRow run_solver(const std::string& id, const std::string& name, const PRInstance& inst,
                            const SolverConfig& cfg, const std::vector<ComplexSignal>& references) {
  const auto solve = solver_by_name(name);
  ResultRow row{id, name};
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const auto trace = solve(inst, cfg);
    row.iterations = trace.iterations();
    row.initial_loss = trace.losses.front();
    row.final_loss = trace.losses.back();
    row.recovered = recovered(trace.final_iterate(), references);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::StepDiverged) throw;
    row.final_loss = std::numeric_limits<double>::infinity();
  }
  row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

struct Prepared {
  PRInstance instance;
  std::vector<ComplexSignal> references;
};

inline Prepared prepare_signal(const ComplexSignal& x, std::size_t grid_mult) {
  auto pairing = pairing_from_autocorr(autocorrelation(x));
  auto inst = make_instance(std::move(pairing), x[0], grid_mult);
  auto refs = reference_solutions(inst);
  return {std::move(inst), std::move(refs)};
}

struct BenchOptions {
  std::vector<std::string> suites{"random"};
  std::size_t n = 6;
  std::size_t trials = 20;
  std::vector<std::string> solvers{"er", "hio", "oracle"};
  std::uint64_t seed = 1;
  std::size_t iters = 0;  // 0: reduction_budget
  std::size_t grid_mult = 4;
  std::int64_t u_hi = 6;
  bool timing = false;
};

struct BenchResult {
  std::vector<std::pair<std::string, ResultRow>> rows;  // (suite, row), sorted by (instance id, solver)
};

inline std::uint64_t trial_seed(std::uint64_t base, std::size_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32),
                    static_cast<std::uint32_t>(trial)};
  std::uint32_t parts[2];
  seq.generate(parts, parts + 2);
  return (static_cast<std::uint64_t>(parts[0]) << 32) | parts[1];
}

inline Prepared make_trial(const std::string& suite, const BenchOptions& o, std::size_t trial) {
  std::mt19937_64 rng(trial_seed(o.seed, trial));
  if (suite == "random") {
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (;;) {
      std::vector<cplx> x(o.n);
      for (auto& v : x) v = cplx(gauss(rng), gauss(rng));
      try {
        return prepare_signal(ComplexSignal(std::move(x)), o.grid_mult);
      } catch (const Error&) {
        // measure-zero root coincidences; redraw
      }
    }
  }
  if (suite == "hard") {
    auto [pp, gamma] = planted_instance(o.n, o.u_hi, rng);
    auto hard = construct_hard_instance(pp, o.grid_mult);
    auto refs = reference_solutions(hard.pr);
    return {std::move(hard.pr), std::move(refs)};
  }
  throw Error(ErrorKind::InvalidArgument, "unknown suite '" + suite + "' (expected random or hard)");
}

inline BenchResult run_bench(const BenchOptions& o) {
  for (const auto& s : o.solvers) (void)solver_by_name(s);
  struct Job {
    std::string suite;
    std::size_t trial;
  };
  std::vector<Job> jobs;
  for (const auto& suite : o.suites) {
    if (suite != "random" && suite != "hard") {
      throw Error(ErrorKind::InvalidArgument, "unknown suite '" + suite + "' (expected random or hard)");
    }
    for (std::size_t t = 0; t < o.trials; ++t) jobs.push_back({suite, t});
  }
  std::vector<std::vector<std::pair<std::string, ResultRow>>> slots(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) {
    const auto& job = jobs[i];
    const auto prepared = make_trial(job.suite, o, job.trial);
    char id[64];
    std::snprintf(id, sizeof(id), "%s-n%zu-t%04zu", job.suite.c_str(), o.n, job.trial);
    std::int64_t umax = 2;
    if (job.suite == "hard") {
      for (const auto& p : prepared.instance.pairing.pairs) {
        umax = std::max(umax, static_cast<std::int64_t>(std::llround(std::abs(p.gamma))));
      }
    }
    SolverConfig cfg;
    cfg.seed = trial_seed(o.seed ^ 0x9e3779b97f4a7c15ULL, job.trial);
    cfg.max_iters = o.iters > 0 ? o.iters : reduction_budget(o.n, umax);
    for (const auto& s : o.solvers) {
      slots[i].emplace_back(job.suite, run_solver(id, s, prepared.instance, cfg, prepared.references));
    }
  });
  BenchResult out;
  for (auto& s : slots) {
    for (auto& r : s) out.rows.push_back(std::move(r));
  }
  std::sort(out.rows.begin(), out.rows.end(), [](const auto& a, const auto& b) {
    if (a.second.instance_id != b.second.instance_id) return a.second.instance_id < b.second.instance_id;
    return a.second.solver < b.second.solver;
  });
  return out;
}

inline void write_bench_csv(std::ostream& os, const BenchResult& r, bool timing) {
  os << "instance_id,suite,solver,iterations,final_loss,recovered" << (timing ? ",wall_ms" : "") << "\n";
  for (const auto& [suite, row] : r.rows) {
    os << row.instance_id << ',' << suite << ',' << row.solver << ',' << row.iterations << ','
       << num(row.final_loss) << ',' << (row.recovered ? "true" : "false");
    if (timing) os << ',' << num(row.wall_ms);
    os << "\n";
  }
}

struct SummaryLine {
  std::string suite;
  std::string solver;
  std::size_t trials = 0;
  std::size_t recovered = 0;
  double rate() const { return trials == 0 ? 0.0 : static_cast<double>(recovered) / static_cast<double>(trials); }
};

inline std::vector<SummaryLine> summarize(const BenchResult& r) {
  std::map<std::pair<std::string, std::string>, SummaryLine> acc;
  for (const auto& [suite, row] : r.rows) {
    auto& line = acc[{suite, row.solver}];
    line.suite = suite;
    line.solver = row.solver;
    ++line.trials;
    if (row.recovered) ++line.recovered;
  }
  std::vector<SummaryLine> out;
  for (auto& [k, v] : acc) out.push_back(v);
  return out;
}

inline void write_summary(std::ostream& os, const std::vector<SummaryLine>& lines) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%-8s %-8s %8s %10s %8s\n", "suite", "solver", "trials", "recovered", "rate");
  os << buf;
  for (const auto& l : lines) {
    std::snprintf(buf, sizeof(buf), "%-8s %-8s %8zu %10zu %8.3f\n", l.suite.c_str(), l.solver.c_str(), l.trials,
                  l.recovered, l.rate());
    os << buf;
  }
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// ---------------------------------------------------------------------------

inline int cmd_autocorr(const std::string& path, std::size_t grid_mult, std::ostream& out) {
  const auto file = io::read_instance(path);
  const auto* s = std::get_if<io::SignalInstance>(&file.content);
  if (!s) throw Error(ErrorKind::KindMismatch, "autocorr needs a signal instance, got " + std::string(file.kind()));
  const auto r = autocorrelation(s->signal);
  for (std::size_t n = 0; n < r.size(); ++n) out << "r(" << n << ") = " << num(r(static_cast<long>(n))) << "\n";
  const auto spec = spectrum_from_autocorr(r, uniform_grid(grid_mult * r.size()));
  out << "omega,R\n";
  for (std::size_t j = 0; j < spec.size(); ++j) out << num(spec.omegas[j]) << ',' << num(spec.values[j]) << "\n";
  return 0;
}

inline int cmd_enumerate(const std::string& path, const std::optional<std::string>& anchor_arg, double tol,
                         std::ostream& out) {
  const auto file = io::read_instance(path);
  ZeroPairing pairing;
  cplx anchor;
  if (const auto* s = std::get_if<io::SignalInstance>(&file.content)) {
    if (s->signal.size() - 1 > kMaxEnumeratedPairs) {
      throw Error(ErrorKind::EnumerationBudgetExceeded,
                  "signal of length " + std::to_string(s->signal.size()) + " needs 2^" +
                      std::to_string(s->signal.size() - 1) + " selections");
    }
    pairing = pairing_from_autocorr(autocorrelation(s->signal));
    anchor = s->signal[0];
  } else if (const auto* p = std::get_if<io::PairingInstance>(&file.content)) {
    pairing = p->pairing;
    anchor = p->anchor;
  } else {
    throw Error(ErrorKind::KindMismatch, "enumerate needs a signal or pairing instance");
  }
  if (anchor_arg) anchor = parse_complex_arg(*anchor_arg);
  if (anchor == cplx{}) throw Error(ErrorKind::ZeroAnchor, "anchor must be nonzero");

  const auto set = enumerate_solutions(pairing, std::arg(anchor));
  const double threshold = tol * std::abs(pairing.scale) / std::norm(anchor);
  const std::size_t n = pairing.signal_length();
  out << "# scale=" << num(pairing.scale) << " anchor=" << num(anchor) << " selections=" << set.solutions.size()
      << "\n";
  out << "index,choices,residual,feasible";
  for (std::size_t k = 0; k < n; ++k) out << ",x" << k << "_re,x" << k << "_im";
  out << "\n";
  for (const auto& sol : set.solutions) {
    std::string bits;
    for (const bool c : sol.choices) bits += c ? 'g' : 'r';
    if (bits.empty()) bits = "-";
    const double residual = product_constraint(pairing, sol.choices, anchor);
    out << sol.index << ',' << bits << ',' << num(residual) << ',' << (residual <= threshold ? "true" : "false");
    for (const auto& v : sol.signal) out << ',' << num(v.real()) << ',' << num(v.imag());
    out << "\n";
  }
  return 0;
}

/// iters == 0 selects reduction_budget(N, u_max), with u_max = 2 outside pp instances.
inline int cmd_solve(const std::string& path, const std::string& solver, SolverConfig cfg, std::size_t iters,
                     std::size_t grid_mult, std::ostream& out) {
  (void)solver_by_name(solver);
  const auto file = io::read_instance(path);
  std::optional<Prepared> prepared;
  std::int64_t umax = 2;
  if (const auto* s = std::get_if<io::SignalInstance>(&file.content)) {
    prepared = prepare_signal(s->signal, grid_mult);
  } else if (const auto* p = std::get_if<io::PairingInstance>(&file.content)) {
    auto inst = make_instance(p->pairing, p->anchor, grid_mult);
    std::vector<ComplexSignal> refs;
    try {
      refs = reference_solutions(inst);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoFeasibleSolution && e.kind() != ErrorKind::EnumerationBudgetExceeded) throw;
    }
    prepared = Prepared{std::move(inst), std::move(refs)};
  } else {
    auto hard = construct_hard_instance(std::get<io::PPInstanceFile>(file.content).pp, grid_mult);
    std::vector<ComplexSignal> refs;
    try {
      refs = reference_solutions(hard.pr);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoFeasibleSolution) throw;
    }
    prepared = Prepared{std::move(hard.pr), std::move(refs)};
    umax = std::get<io::PPInstanceFile>(file.content).pp.u_max();
  }
  cfg.max_iters = iters > 0 ? iters : reduction_budget(prepared->instance.signal_length(), umax);
  const auto row = run_solver(file.id, solver, prepared->instance, cfg, prepared->references);
  out << row_to_json(row).dump() << "\n";
  return 0;
}

inline std::string index_set(const std::vector<std::size_t>& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out + "}";
}

inline int cmd_decide(const std::string& path, const std::string& solver, const DecideOptions& opts,
                      std::ostream& out) {
  const auto solve = solver_by_name(solver);
  const auto file = io::read_instance(path);
  const auto* p = std::get_if<io::PPInstanceFile>(&file.content);
  if (!p) throw Error(ErrorKind::KindMismatch, "decide needs a pp instance, got " + std::string(file.kind()));
  const auto traced = decide_pp_traced(p->pp, solve, opts);
  for (std::size_t i = 0; i < traced.rounds.size(); ++i) {
    const auto& round = traced.rounds[i];
    out << "round " << i + 1 << ": U=" << index_set(round.indices) << " u_max=" << round.u_max;
    if (round.solver_infeasible) out << " solver: no feasible signal";
    for (std::size_t j = 0; j < round.results.size(); ++j) {
      const auto& r = round.results[j];
      out << " | k=" << round.indices[j] << " " << to_string(r.verdict) << " |X(-u)|=" << num(r.at_root)
          << " |X(-1/u)|=" << num(r.at_recip);
    }
    out << "\n";
  }
  for (const auto& [a, b] : traced.decision.removed_pairs) out << "removed duplicate pair (" << a << "," << b << ")\n";
  if (traced.quot) out << "quot = " << traced.quot->str() << ", u_N = " << p->pp.last() << "\n";
  const auto& d = traced.decision;
  if (d.answer == PPAnswer::HasSolution) {
    out << "The product partition problem has a solution";
    if (d.witness) out << " Gamma = " << index_set(*d.witness);
    out << "\n";
    return 0;
  }
  out << "The product partition problem has no solution\n";
  return 1;
}

inline int cmd_bench(const BenchOptions& o, const std::optional<std::string>& out_path, std::ostream& out,
                     std::ostream& err) {
  const auto result = run_bench(o);
  const auto summary = summarize(result);
  if (out_path) {
    std::ofstream f(*out_path);
    if (!f) throw Error(ErrorKind::InvalidArgument, "cannot write " + *out_path);
    write_bench_csv(f, result, o.timing);
    write_summary(out, summary);
  } else {
    write_bench_csv(out, result, o.timing);
    write_summary(err, summary);
  }
  return 0;
}

// ---------------------------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fourier phase retrieval laboratory"};
  app.require_subcommand(1);

  std::string file;
  std::size_t grid_mult = 4;
  double tol = kAnchorTol;
  std::optional<std::string> anchor;
  std::string solver = "oracle";
  std::uint64_t seed = 0;
  std::size_t iters = 0;
  double step = 0.0;
  double beta = 0.9;
  double loss_tol = 1e-20;

  auto* autocorr = app.add_subcommand("autocorr", "print r(n) and (omega, R(omega)) samples of a signal");
  autocorr->add_option("input", file, "instance file")->required();
  autocorr->add_option("--grid-mult", grid_mult, "samples per signal entry (M = mult * N)");

  auto* enumerate = app.add_subcommand("enumerate", "list every signal with the same Fourier intensity");
  enumerate->add_option("input", file, "instance file")->required();
  enumerate->add_option("--anchor", anchor, "anchor x(0) as re,im");
  enumerate->add_option("--tol", tol, "relative product-constraint tolerance");

  auto* solve = app.add_subcommand("solve", "run one solver and print a JSON result row");
  solve->add_option("input", file, "instance file")->required();
  solve->add_option("--solver", solver, "er | hio | wf | oracle");
  solve->add_option("--seed", seed, "random start seed");
  solve->add_option("--iters", iters, "iteration budget (default 100 N^2 ceil(log2(u_max + 2)))");
  solve->add_option("--grid-mult", grid_mult, "samples per signal entry (M = mult * N)");
  solve->add_option("--step", step, "Wirtinger step size on the normalized instance (0: automatic)");
  solve->add_option("--beta", beta, "HIO feedback parameter");
  solve->add_option("--tol", loss_tol, "loss tolerance on the normalized instance");

  auto* decide = app.add_subcommand("decide", "decide a Product Partition instance through phase retrieval");
  decide->add_option("input", file, "instance file")->required();
  decide->add_option("--solver", solver, "er | hio | wf | oracle");
  decide->add_option("--seed", seed, "random start seed");
  decide->add_option("--iters", iters, "iterations per round (default 100 N^2 ceil(log2(u_max + 2)))");
  decide->add_option("--grid-mult", grid_mult, "samples per signal entry (M = mult * N)");

  BenchOptions bench_opts;
  std::string suites = "random";
  std::string solvers = "er,hio,oracle";
  std::optional<std::string> out_path;
  auto* bench = app.add_subcommand("bench", "recovery rates of several solvers on random or hard instances");
  bench->add_option("--suite", suites, "random, hard, or random,hard");
  bench->add_option("--n", bench_opts.n, "signal length");
  bench->add_option("--trials", bench_opts.trials, "instances per suite");
  bench->add_option("--solvers", solvers, "comma-separated solver names");
  bench->add_option("--seed", bench_opts.seed, "base seed");
  bench->add_option("--iters", bench_opts.iters, "iteration budget (0: 100 N^2 ceil(log2(u_max + 2)))");
  bench->add_option("--grid-mult", bench_opts.grid_mult, "samples per signal entry (M = mult * N)");
  bench->add_option("--u-max", bench_opts.u_hi, "largest integer drawn for hard instances");
  bench->add_option("--out", out_path, "CSV output path (default stdout, summary then goes to stderr)");
  bench->add_flag("--timing", bench_opts.timing, "add a wall_ms column (output is then not reproducible)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    SolverConfig cfg;
    cfg.seed = seed;
    cfg.step_size = step;
    cfg.beta_hio = beta;
    cfg.loss_tol = loss_tol;
    if (*autocorr) return cmd_autocorr(file, grid_mult, out);
    if (*enumerate) return cmd_enumerate(file, anchor, tol, out);
    if (*solve) return cmd_solve(file, solver, cfg, iters, grid_mult, out);
    if (*decide) {
      DecideOptions opts;
      opts.solver = cfg;
      opts.grid_mult = grid_mult;
      if (iters > 0) opts.iterations = iters;
      return cmd_decide(file, solver, opts, out);
    }
    if (*bench) {
      bench_opts.suites = split_list(suites);
      bench_opts.solvers = split_list(solvers);
      return cmd_bench(bench_opts, out_path, out, err);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace fprlab::cli
