// Every signal of length 4 sharing the Fourier intensity of x, and the one
// the anchor x(0) picks out.

#include <cstdio>

#include "fprlab/fprlab.hpp"

using namespace fprlab;

namespace {

void print_signal(const char* label, const ComplexSignal& x) {
  std::printf("%-10s", label);
  for (const auto& v : x) std::printf(" (%8.4f,%8.4f)", v.real(), v.imag());
  std::printf("\n");
}

}  // namespace

int main() {
  const ComplexSignal x{cplx(1.0, 0.5), cplx(-0.3, 1.2), cplx(0.8, -0.7), cplx(0.4, 0.1)};
  const auto r = autocorrelation(x);
  const auto pairing = pairing_from_autocorr(r);

  std::printf("zero pairs of S(z):\n");
  for (const auto& p : pairing.pairs) {
    std::printf("  gamma = %.5f%+.5fi   1/conj(gamma) = %.5f%+.5fi\n", p.gamma.real(), p.gamma.imag(),
                p.gamma_recip.real(), p.gamma_recip.imag());
  }

  const auto all = enumerate_solutions(pairing);
  const auto grid = uniform_grid(16);
  const auto target = fourier_intensity(x, grid);
  std::printf("\n%zu root selections:\n", all.solutions.size());
  for (const auto& s : all.solutions) {
    double worst = 0.0;
    const auto got = fourier_intensity(s.signal, grid);
    for (std::size_t j = 0; j < grid.size(); ++j) worst = std::max(worst, std::abs(got.values[j] - target.values[j]));
    char label[16];
    std::snprintf(label, sizeof(label), "#%llu", static_cast<unsigned long long>(s.index));
    print_signal(label, s.signal);
    std::printf("%-10s max |R - R_x| = %.2e, product residual for x(0) = %.3e\n", "", worst,
                product_constraint(pairing, s.choices, x[0]));
  }

  std::printf("\ndistinct up to phase, shift and conjugate reflection: %zu\n", canonicalized(all).solutions.size());

  const auto anchored = filter_by_anchor(all, x[0]);
  std::printf("\nsurvivors of the anchor x(0) = %.2f%+.2fi: %zu\n", x[0].real(), x[0].imag(), anchored.solutions.size());
  print_signal("recovered", anchored.solutions.front().signal);
  print_signal("truth", x);
}
