#pragma once

// Phase retrieval solvers behind one contract: given the factored intensity
// and the anchor x(0) = x0, produce a sequence of iterates x_0, x_1, ...
//
// Iterative solvers work on a copy of the instance scaled by 1/sqrt(r(0)), so
// that the signal has unit norm, and scale every iterate back afterwards.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "fprlab/ambiguity.hpp"
#include "fprlab/error.hpp"
#include "fprlab/signal.hpp"
#include "fprlab/ztransform.hpp"

namespace fprlab {

/// Solver input: the zero pairing, the anchor, and the intensity sampled on a
/// uniform grid of M = grid_mult * N points.
struct PRInstance {
  ZeroPairing pairing;
  cplx anchor;
  SpectrumSamples spectrum;
  double normalization = 1.0;  // 1 / sqrt(r(0))

  std::size_t signal_length() const noexcept { return pairing.signal_length(); }
};

inline PRInstance make_instance(ZeroPairing pairing, cplx anchor, std::size_t grid_mult = 4) {
  if (anchor == cplx{}) throw Error(ErrorKind::ZeroAnchor, "anchor x0 must be nonzero");
  if (grid_mult < 2) throw Error(ErrorKind::InvalidArgument, "grid multiplier must be at least 2");
  const std::size_t n = pairing.signal_length();
  const auto reference = signal_from_selection(pairing, std::vector<bool>(pairing.pairs.size(), true), 0.0);
  const auto r = autocorrelation(reference);
  auto spectrum = spectrum_from_autocorr(r, uniform_grid(grid_mult * n));
  const double r0 = r(0).real();
  return PRInstance{std::move(pairing), anchor, std::move(spectrum), 1.0 / std::sqrt(r0)};
}

struct SolverConfig {
  std::size_t max_iters = 1000;
  double loss_tol = 1e-20;   // on the normalized instance
  double step_size = 0.0;    // Wirtinger step on the normalized instance; 0 picks 0.2 / (M * max R)
  double beta_hio = 0.9;
  std::uint64_t seed = 0;
  std::optional<ComplexSignal> initial;  // overrides the random start

  void validate() const {
    if (max_iters < 1) throw Error(ErrorKind::InvalidArgument, "max_iters must be >= 1");
    if (!(beta_hio > 0.0 && beta_hio < 1.0)) throw Error(ErrorKind::InvalidArgument, "beta_hio must lie in (0, 1)");
    if (step_size < 0.0) throw Error(ErrorKind::InvalidArgument, "step_size must be nonnegative");
  }
};

struct IterateTrace {
  std::vector<ComplexSignal> iterates;
  std::vector<double> losses;
  bool converged = false;

  std::size_t iterations() const noexcept { return iterates.empty() ? 0 : iterates.size() - 1; }
  const ComplexSignal& final_iterate() const {
    if (iterates.empty()) throw Error(ErrorKind::SolverFailure, "solver produced no iterate");
    return iterates.back();
  }
};

namespace detail {

inline void check_grid(const SpectrumSamples& s) {
  if (s.omegas.size() != s.values.size() || s.omegas.empty()) {
    throw Error(ErrorKind::GridMismatch, "spectrum has " + std::to_string(s.omegas.size()) + " angles and " +
                                             std::to_string(s.values.size()) + " values");
  }
}

}  // namespace detail

/// sum_j (|z^(omega_j)| - sqrt(R_j))^2
inline double amplitude_loss(const ComplexSignal& z, const SpectrumSamples& s) {
  detail::check_grid(s);
  double loss = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j) {
    const double d = std::abs(dtft(z.entries(), s.omegas[j])) - std::sqrt(std::max(0.0, s.values[j]));
    loss += d * d;
  }
  return loss;
}

/// sum_j (|z^(omega_j)|^2 - R_j)^2
inline double intensity_loss(const ComplexSignal& z, const SpectrumSamples& s) {
  detail::check_grid(s);
  double loss = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j) {
    const double d = std::norm(dtft(z.entries(), s.omegas[j])) - s.values[j];
    loss += d * d;
  }
  return loss;
}

/// Gradient of intensity_loss with respect to (Re z(n), Im z(n)), packed as
/// d/dRe + i d/dIm = 4 sum_j (|z^_j|^2 - R_j) z^_j e^{i omega_j n}.
inline std::vector<cplx> intensity_loss_gradient(const ComplexSignal& z, const SpectrumSamples& s) {
  detail::check_grid(s);
  std::vector<cplx> grad(z.size());
  for (std::size_t j = 0; j < s.size(); ++j) {
    const cplx zhat = dtft(z.entries(), s.omegas[j]);
    const cplx weight = 4.0 * (std::norm(zhat) - s.values[j]) * zhat;
    const cplx w = std::polar(1.0, s.omegas[j]);
    cplx wn = 1.0;
    for (std::size_t n = 0; n < z.size(); ++n) {
      grad[n] += weight * wn;
      wn *= w;
    }
  }
  return grad;
}

namespace detail {

// The instance scaled to unit signal norm, with its DFT twiddles.
struct Workspace {
  std::size_t n;
  std::size_t m;
  cplx anchor;
  std::vector<double> magnitudes;  // sqrt(R_j)
  SpectrumSamples spectrum;
  std::vector<cplx> twiddle;  // e^{-i omega_j t}, row-major [j][t], t < m

  explicit Workspace(const PRInstance& inst)
      : n(inst.signal_length()), m(inst.spectrum.size()), anchor(inst.anchor * inst.normalization) {
    check_grid(inst.spectrum);
    if (m < 2 * n - 1 || !is_uniform_grid(inst.spectrum.omegas)) {
      throw Error(ErrorKind::GridMismatch, "iterative solvers need a uniform grid with M >= 2N - 1");
    }
    const double s2 = inst.normalization * inst.normalization;
    spectrum.omegas = inst.spectrum.omegas;
    spectrum.values.resize(m);
    magnitudes.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
      spectrum.values[j] = inst.spectrum.values[j] * s2;
      magnitudes[j] = std::sqrt(std::max(0.0, spectrum.values[j]));
    }
    twiddle.resize(m * m);
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t t = 0; t < m; ++t) {
        twiddle[j * m + t] = std::polar(1.0, -kTwoPi * static_cast<double>((j * t) % m) / static_cast<double>(m));
      }
    }
  }

  // Forward DFT of a length-`len` prefix (len <= m), zero padded to m.
  std::vector<cplx> forward(const std::vector<cplx>& v, std::size_t len) const {
    std::vector<cplx> out(m);
    for (std::size_t j = 0; j < m; ++j) {
      cplx acc{};
      for (std::size_t t = 0; t < len; ++t) acc += v[t] * twiddle[j * m + t];
      out[j] = acc;
    }
    return out;
  }

  // First `len` entries of the inverse DFT.
  std::vector<cplx> inverse(const std::vector<cplx>& vhat, std::size_t len) const {
    std::vector<cplx> out(len);
    for (std::size_t t = 0; t < len; ++t) {
      cplx acc{};
      for (std::size_t j = 0; j < m; ++j) acc += vhat[j] * std::conj(twiddle[j * m + t]);
      out[t] = acc / static_cast<double>(m);
    }
    return out;
  }

  // Replace magnitudes by sqrt(R), keep phases (phase 0 where the value is 0).
  std::vector<cplx> project_magnitudes(std::vector<cplx> vhat) const {
    for (std::size_t j = 0; j < m; ++j) {
      const double a = std::abs(vhat[j]);
      vhat[j] = a > 0.0 ? vhat[j] * (magnitudes[j] / a) : cplx(magnitudes[j], 0.0);
    }
    return vhat;
  }

  double amplitude_loss_of(const std::vector<cplx>& z) const {
    const auto zhat = forward(z, n);
    double loss = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double d = std::abs(zhat[j]) - magnitudes[j];
      loss += d * d;
    }
    return loss;
  }

  std::vector<cplx> start(const SolverConfig& cfg, double normalization) const {
    std::vector<cplx> z(n);
    if (cfg.initial) {
      if (cfg.initial->size() != n) {
        throw Error(ErrorKind::InvalidArgument, "initial iterate has length " + std::to_string(cfg.initial->size()) +
                                                    ", expected " + std::to_string(n));
      }
      for (std::size_t k = 0; k < n; ++k) z[k] = (*cfg.initial)[k] * normalization;
    } else {
      std::mt19937_64 rng(cfg.seed);
      std::normal_distribution<double> gauss(0.0, 1.0 / std::sqrt(2.0 * static_cast<double>(n)));
      for (auto& v : z) v = cplx(gauss(rng), gauss(rng));
    }
    z[0] = anchor;
    return z;
  }
};

// Undo the normalization; the anchor is restored bitwise.
inline ComplexSignal denormalized(const std::vector<cplx>& z, const PRInstance& inst) {
  std::vector<cplx> out(z.size());
  for (std::size_t k = 0; k < z.size(); ++k) out[k] = z[k] / inst.normalization;
  out[0] = inst.anchor;
  return ComplexSignal(std::move(out));
}

inline double denormalized_loss(double loss, const PRInstance& inst) {
  return loss / (inst.normalization * inst.normalization);
}

}  // namespace detail

/// Error reduction (Gerchberg-Saxton): alternate between the Fourier
/// magnitude set and the affine set {support 0..N-1, z(0) = x0}. Both are
/// nearest-point maps, so the amplitude loss cannot increase.
inline IterateTrace error_reduction_solve(const PRInstance& inst, const SolverConfig& cfg) {
  cfg.validate();
  const detail::Workspace ws(inst);
  auto z = ws.start(cfg, inst.normalization);
  IterateTrace trace;
  for (std::size_t it = 0;; ++it) {
    const double loss = ws.amplitude_loss_of(z);
    trace.iterates.push_back(detail::denormalized(z, inst));
    trace.losses.push_back(detail::denormalized_loss(loss, inst));
    if (loss <= cfg.loss_tol) {
      trace.converged = true;
      break;
    }
    if (it == cfg.max_iters) break;
    const auto y = ws.inverse(ws.project_magnitudes(ws.forward(z, ws.n)), ws.n);
    for (std::size_t k = 1; k < ws.n; ++k) z[k] = y[k];
    z[0] = ws.anchor;
  }
  return trace;
}

/// Hybrid input-output. The internal state lives on the full length-M grid:
/// on-support entries take the Fourier-projected value, the rest receive the
/// feedback update state - beta * (projected - constraint). Reported iterates
/// are the state restricted to the support with z(0) = x0.
inline IterateTrace hio_solve(const PRInstance& inst, const SolverConfig& cfg) {
  cfg.validate();
  const detail::Workspace ws(inst);
  const auto z0 = ws.start(cfg, inst.normalization);
  std::vector<cplx> state(ws.m);
  std::copy(z0.begin(), z0.end(), state.begin());
  const double beta = cfg.beta_hio;

  IterateTrace trace;
  for (std::size_t it = 0;; ++it) {
    std::vector<cplx> z(state.begin(), state.begin() + static_cast<long>(ws.n));
    z[0] = ws.anchor;
    const double loss = ws.amplitude_loss_of(z);
    trace.iterates.push_back(detail::denormalized(z, inst));
    trace.losses.push_back(detail::denormalized_loss(loss, inst));
    if (loss <= cfg.loss_tol) {
      trace.converged = true;
      break;
    }
    if (it == cfg.max_iters) break;
    const auto y = ws.inverse(ws.project_magnitudes(ws.forward(state, ws.m)), ws.m);
    state[0] = ws.anchor + (state[0] - ws.anchor) - beta * (y[0] - ws.anchor);
    for (std::size_t t = 1; t < ws.n; ++t) state[t] = y[t];
    for (std::size_t t = ws.n; t < ws.m; ++t) state[t] -= beta * y[t];
  }
  return trace;
}

/// Gradient descent on the intensity loss with the anchor held fixed.
inline IterateTrace wirtinger_flow_solve(const PRInstance& inst, const SolverConfig& cfg) {
  cfg.validate();
  const detail::Workspace ws(inst);
  auto z = ws.start(cfg, inst.normalization);
  double step = cfg.step_size;
  if (step == 0.0) {
    const double rmax = *std::max_element(ws.spectrum.values.begin(), ws.spectrum.values.end());
    step = 0.2 / (static_cast<double>(ws.m) * std::max(rmax, 1e-300));
  }

  IterateTrace trace;
  double initial_loss = -1.0;
  for (std::size_t it = 0;; ++it) {
    const ComplexSignal current(z);
    const double loss = intensity_loss(current, ws.spectrum);
    if (initial_loss < 0.0) initial_loss = loss;
    if (!std::isfinite(loss) || (initial_loss > 0.0 && loss > 1e12 * initial_loss)) {
      throw Error(ErrorKind::StepDiverged, "intensity loss grew from " + std::to_string(initial_loss) + " to " +
                                               std::to_string(loss) + "; reduce step_size");
    }
    trace.iterates.push_back(detail::denormalized(z, inst));
    trace.losses.push_back(detail::denormalized_loss(detail::denormalized_loss(loss, inst), inst));
    if (loss <= cfg.loss_tol) {
      trace.converged = true;
      break;
    }
    if (it == cfg.max_iters) break;
    const auto grad = intensity_loss_gradient(current, ws.spectrum);
    for (std::size_t k = 1; k < ws.n; ++k) z[k] -= step * grad[k];
    z[0] = ws.anchor;
  }
  return trace;
}

/// Exact reference solver: enumerate every root selection and keep the one
/// the anchor admits. Exponential in N by construction.
inline IterateTrace oracle_solve(const PRInstance& inst, const SolverConfig& /*cfg*/) {
  const auto all = enumerate_solutions(inst.pairing, 0.0);
  const auto feasible = filter_by_anchor(all, inst.anchor);
  std::vector<cplx> x(feasible.solutions.front().signal.begin(), feasible.solutions.front().signal.end());
  x[0] = inst.anchor;
  ComplexSignal result(std::move(x));
  IterateTrace trace;
  trace.losses.push_back(amplitude_loss(result, inst.spectrum));
  trace.iterates.push_back(std::move(result));
  trace.converged = true;
  return trace;
}

using SolverFn = std::function<IterateTrace(const PRInstance&, const SolverConfig&)>;

inline const std::vector<std::string>& solver_names() {
  static const std::vector<std::string> names{"er", "hio", "wf", "oracle"};
  return names;
}

inline SolverFn solver_by_name(std::string_view name) {
  if (name == "er") return error_reduction_solve;
  if (name == "hio") return hio_solve;
  if (name == "wf") return wirtinger_flow_solve;
  if (name == "oracle") return oracle_solve;
  throw Error(ErrorKind::UnknownSolver, "no solver named '" + std::string(name) + "' (expected er, hio, wf, oracle)");
}

/// Iteration budget 100 N^2 ceil(log2(u_max + 2)), a concrete Poly(N) log u_max.
inline std::size_t reduction_budget(std::size_t n, std::int64_t u_max) {
  const auto log_term = static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(u_max) + 2.0)));
  return 100 * n * n * std::max<std::size_t>(1, log_term);
}

/// Every anchored solution of the instance, from the exact solver. Used to
/// score iterative solvers, since non-generic instances can admit several.
inline std::vector<ComplexSignal> reference_solutions(const PRInstance& inst) {
  const auto feasible = filter_by_anchor(enumerate_solutions(inst.pairing, 0.0), inst.anchor);
  std::vector<ComplexSignal> out;
  for (const auto& s : feasible.solutions) out.push_back(s.signal);
  return out;
}

}  // namespace fprlab
