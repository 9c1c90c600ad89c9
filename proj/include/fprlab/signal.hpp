#pragma once

// Finite complex signals, their autocorrelations, and sampled Fourier
// intensities. Everything here is a pure function on immutable values.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fprlab/error.hpp"

namespace fprlab {

using cplx = std::complex<double>;

inline constexpr double kDefaultTol = 1e-9;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// A finite complex sequence x(0..N-1), N >= 1.
class ComplexSignal {
 public:
  explicit ComplexSignal(std::vector<cplx> entries) : entries_(std::move(entries)) {
    if (entries_.empty()) {
      throw Error(ErrorKind::InvalidArgument, "signal must have at least one entry");
    }
  }
  ComplexSignal(std::initializer_list<cplx> entries)
      : ComplexSignal(std::vector<cplx>(entries)) {}

  std::size_t size() const noexcept { return entries_.size(); }
  const cplx& operator[](std::size_t k) const { return entries_[k]; }
  cplx& operator[](std::size_t k) { return entries_[k]; }
  std::span<const cplx> entries() const noexcept { return entries_; }
  const std::vector<cplx>& vec() const noexcept { return entries_; }

  auto begin() const noexcept { return entries_.begin(); }
  auto end() const noexcept { return entries_.end(); }

  /// x(0) != 0 and x(N-1) != 0, which makes r(N-1) nonzero.
  bool full_support() const noexcept {
    return entries_.front() != cplx{} && entries_.back() != cplx{};
  }

 private:
  std::vector<cplx> entries_;
};

inline double norm2(const ComplexSignal& x) {
  double s = 0.0;
  for (const auto& v : x) s += std::norm(v);
  return std::sqrt(s);
}

inline double distance(const ComplexSignal& a, const ComplexSignal& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::InvalidArgument, "signals of different lengths");
  }
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += std::norm(a[k] - b[k]);
  return std::sqrt(s);
}

inline ComplexSignal scaled(const ComplexSignal& x, cplx factor) {
  std::vector<cplx> out(x.begin(), x.end());
  for (auto& v : out) v *= factor;
  return ComplexSignal(std::move(out));
}

/// y(k) = conj(x(N-1-k)).
inline ComplexSignal conj_reflect(const ComplexSignal& x) {
  std::vector<cplx> out(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = std::conj(x[x.size() - 1 - k]);
  return ComplexSignal(std::move(out));
}

/// Conjugate-symmetric sequence r(-N+1..N-1), stored as the nonnegative lags.
class Autocorrelation {
 public:
  explicit Autocorrelation(std::vector<cplx> nonnegative_lags)
      : lags_(std::move(nonnegative_lags)) {
    if (lags_.empty()) {
      throw Error(ErrorKind::InvalidArgument, "autocorrelation must have at least one lag");
    }
  }

  /// Signal length N the autocorrelation belongs to.
  std::size_t size() const noexcept { return lags_.size(); }
  std::span<const cplx> lags() const noexcept { return lags_; }

  /// r(n) for any integer lag; negative lags come from conjugate symmetry.
  cplx operator()(long n) const {
    const auto m = static_cast<std::size_t>(n < 0 ? -n : n);
    if (m >= lags_.size()) return {};
    return n < 0 ? std::conj(lags_[m]) : lags_[m];
  }

 private:
  std::vector<cplx> lags_;
};

/// Intensity samples R(omega_j) on a set of angles in [0, 2pi).
struct SpectrumSamples {
  std::vector<double> omegas;
  std::vector<double> values;

  std::size_t size() const noexcept { return omegas.size(); }
};

/// omega_j = 2 pi j / M.
inline std::vector<double> uniform_grid(std::size_t m) {
  std::vector<double> out(m);
  for (std::size_t j = 0; j < m; ++j) out[j] = kTwoPi * static_cast<double>(j) / static_cast<double>(m);
  return out;
}

/// r(n) = sum_k conj(x(k)) x(k+n), zero-extended outside 0..N-1.
inline Autocorrelation autocorrelation(const ComplexSignal& x) {
  const std::size_t n = x.size();
  std::vector<cplx> r(n);
  for (std::size_t lag = 0; lag < n; ++lag) {
    cplx acc{};
    for (std::size_t k = 0; k + lag < n; ++k) acc += std::conj(x[k]) * x[k + lag];
    r[lag] = acc;
  }
  r[0] = cplx(r[0].real(), 0.0);
  return Autocorrelation(std::move(r));
}

/// DTFT value sum_n x(n) e^{-i omega n} by Horner in w = e^{-i omega}.
inline cplx dtft(std::span<const cplx> x, double omega) {
  const cplx w = std::polar(1.0, -omega);
  cplx acc{};
  for (std::size_t k = x.size(); k-- > 0;) acc = acc * w + x[k];
  return acc;
}

inline SpectrumSamples fourier_intensity(const ComplexSignal& x, std::span<const double> omegas) {
  SpectrumSamples s;
  s.omegas.assign(omegas.begin(), omegas.end());
  s.values.resize(omegas.size());
  for (std::size_t j = 0; j < omegas.size(); ++j) s.values[j] = std::norm(dtft(x.entries(), omegas[j]));
  return s;
}

/// R(omega) = sum_n r(n) e^{-i omega n}. Conjugate lags are summed in pairs,
/// so the only imaginary residue left is that of the stored r(0).
inline SpectrumSamples spectrum_from_autocorr(const Autocorrelation& r, std::span<const double> omegas,
                                              double tol = kDefaultTol) {
  const double residue = std::abs(r(0).imag());
  if (residue > tol * std::max(1.0, std::abs(r(0).real()))) {
    throw Error(ErrorKind::ImaginaryResidueExceeded,
                "imaginary part of r(0) is " + std::to_string(residue));
  }
  SpectrumSamples s;
  s.omegas.assign(omegas.begin(), omegas.end());
  s.values.resize(omegas.size());
  for (std::size_t j = 0; j < omegas.size(); ++j) {
    double acc = r(0).real();
    for (std::size_t n = 1; n < r.size(); ++n) {
      acc += 2.0 * (r(static_cast<long>(n)) * std::polar(1.0, -omegas[j] * static_cast<double>(n))).real();
    }
    s.values[j] = acc;
  }
  return s;
}

inline bool is_uniform_grid(std::span<const double> omegas, double tol = 1e-12) {
  const auto m = static_cast<double>(omegas.size());
  for (std::size_t j = 0; j < omegas.size(); ++j) {
    if (std::abs(omegas[j] - kTwoPi * static_cast<double>(j) / m) > tol * kTwoPi) return false;
  }
  return true;
}

/// Exact trigonometric-moment inversion on a uniform grid with M >= 2N-1.
inline Autocorrelation autocorr_from_spectrum(const SpectrumSamples& s, std::size_t n) {
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "signal length must be positive");
  if (s.values.size() != s.omegas.size()) {
    throw Error(ErrorKind::GridMismatch, "omega and value counts differ");
  }
  const std::size_t m = s.size();
  if (m < 2 * n - 1) {
    throw Error(ErrorKind::InsufficientSamples,
                "need at least " + std::to_string(2 * n - 1) + " samples, got " + std::to_string(m));
  }
  if (!is_uniform_grid(s.omegas)) {
    throw Error(ErrorKind::NonUniformGrid, "inversion requires omega_j = 2 pi j / M");
  }
  std::vector<cplx> r(n);
  for (std::size_t lag = 0; lag < n; ++lag) {
    cplx acc{};
    for (std::size_t j = 0; j < m; ++j) {
      acc += s.values[j] * std::polar(1.0, s.omegas[j] * static_cast<double>(lag));
    }
    r[lag] = acc / static_cast<double>(m);
  }
  r[0] = cplx(r[0].real(), 0.0);
  return Autocorrelation(std::move(r));
}

/// Checks the Autocorrelation invariants: real nonnegative r(0) dominating
/// every lag, and a spectrum that is nonnegative on a dense grid.
inline bool is_valid_autocorrelation(const Autocorrelation& r, double tol = kDefaultTol,
                                     std::size_t dense_points = 1024) {
  const double r0 = r(0).real();
  const double scale = std::max(1.0, std::abs(r0));
  if (std::abs(r(0).imag()) > tol * scale || r0 < -tol * scale) return false;
  for (std::size_t n = 1; n < r.size(); ++n) {
    if (std::abs(r(static_cast<long>(n))) > r0 + tol * scale) return false;
  }
  const auto grid = uniform_grid(dense_points);
  const auto spec = spectrum_from_autocorr(r, grid, tol);
  return std::all_of(spec.values.begin(), spec.values.end(),
                     [&](double v) { return v >= -tol * scale; });
}

}  // namespace fprlab
