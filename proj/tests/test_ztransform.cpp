#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "fprlab/ambiguity.hpp"
#include "fprlab/ztransform.hpp"
#include "support.hpp"

using namespace fprlab;
using Catch::Approx;

namespace {

bool contains_root(const std::vector<cplx>& roots, cplx z, double tol) {
  return std::any_of(roots.begin(), roots.end(), [&](cplx r) { return std::abs(r - z) <= tol; });
}

}  // namespace

TEST_CASE("eval_ztransform", "[ztransform]") {
  const ComplexSignal x{1.0, -2.0};
  CHECK(std::abs(eval_ztransform(x, 2.0)) < 1e-15);
  CHECK(eval_ztransform(x, -0.5) == cplx(5.0));
  CHECK(std::abs(eval_ztransform(ComplexSignal{9.0, 45.0, 54.0}, -2.0)) < 1e-12);
  CHECK(eval_ztransform(ComplexSignal{3.0}, 0.0) == cplx(3.0));
  CHECK_THROWS_AS(eval_ztransform(x, 0.0), Error);
}

TEST_CASE("build_S_poly", "[ztransform]") {
  const auto p = build_S_poly(autocorrelation(ComplexSignal{1.0, -2.0}));
  REQUIRE(p.degree() == 2);
  CHECK(p[0] == cplx(-2.0));
  CHECK(p[1] == cplx(5.0));
  CHECK(p[2] == cplx(-2.0));

  CHECK(build_S_poly(Autocorrelation({cplx(1.0)})).degree() == 0);

  SECTION("(9, 45, 54) has roots -2, -1/2, -3, -1/3") {
    const auto s = build_S_poly(autocorrelation(ComplexSignal{9.0, 45.0, 54.0}));
    REQUIRE(s.degree() == 4);
    for (const double z : {-2.0, -0.5, -3.0, -1.0 / 3.0}) CHECK(std::abs(s(z)) < 1e-9);
  }

  SECTION("constant term is r(N-1), leading term its conjugate") {
    const auto r = autocorrelation(ComplexSignal{1.0, cplx(0.0, 2.0)});
    const auto s = build_S_poly(r);
    CHECK(s[0] == r(1));
    CHECK(s[2] == std::conj(r(1)));
  }

  SECTION("vanishing last lag") {
    try {
      (void)build_S_poly(Autocorrelation({1.0, 0.0}));
      FAIL("expected DegenerateLeadingLag");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::DegenerateLeadingLag);
    }
  }
}

TEST_CASE("find_roots", "[ztransform]") {
  SECTION("quadratic formula oracle") {
    const auto roots = find_roots(PolyCoeffs({-2.0, 5.0, -2.0}));
    // 2z^2 - 5z + 2 = 0: z = (5 +- sqrt(25 - 16)) / 4
    REQUIRE(roots.size() == 2);
    CHECK(contains_root(roots, (5.0 + 3.0) / 4.0, 1e-12));
    CHECK(contains_root(roots, (5.0 - 3.0) / 4.0, 1e-12));
  }
  SECTION("z^2 = 1") {
    const auto roots = find_roots(PolyCoeffs({-1.0, 0.0, 1.0}));
    CHECK(contains_root(roots, 1.0, 1e-12));
    CHECK(contains_root(roots, -1.0, 1e-12));
  }
  SECTION("(z + 2)(z + 3)") {
    const auto roots = find_roots(PolyCoeffs({6.0, 5.0, 1.0}));
    CHECK(contains_root(roots, -2.0, 1e-12));
    CHECK(contains_root(roots, -3.0, 1e-12));
  }
  SECTION("random complex roots are recovered") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<cplx> truth(2 + trial % 20);
      for (auto& z : truth) z = cplx(g(rng), g(rng));
      const auto roots = find_roots(PolyCoeffs(test::oracle_expand(truth, cplx(g(rng), g(rng)))));
      REQUIRE(roots.size() == truth.size());
      for (const auto& z : truth) CHECK(contains_root(roots, z, 1e-6 * std::max(1.0, std::abs(z))));
    }
  }
  SECTION("degree zero is rejected") { CHECK_THROWS_AS(find_roots(PolyCoeffs({3.0})), Error); }
}

TEST_CASE("pair_roots", "[ztransform]") {
  SECTION("{2, 1/2}") {
    const auto p = pair_roots({2.0, 0.5}, -2.0);
    REQUIRE(p.pairs.size() == 1);
    CHECK(p.pairs[0].gamma == cplx(2.0));
    CHECK(p.pairs[0].gamma_recip == cplx(0.5));
    CHECK_FALSE(p.pairs[0].unit_circle);
  }
  SECTION("{-2, -1/2, -3, -1/3}") {
    const auto p = pair_roots({-2.0, -0.5, -3.0, -1.0 / 3.0}, 486.0);
    REQUIRE(p.pairs.size() == 2);
    CHECK(p.pairs[0].gamma == cplx(-2.0));
    CHECK(p.pairs[0].gamma_recip == cplx(-0.5));
    CHECK(p.pairs[1].gamma == cplx(-3.0));
    CHECK(std::abs(p.pairs[1].gamma_recip - (-1.0 / 3.0)) < 1e-16);
    CHECK(is_valid_pairing(p));
  }
  SECTION("double root on the unit circle becomes a self-pair") {
    const cplx i(0.0, 1.0);
    const auto p = pair_roots({i, i}, 1.0);
    REQUIRE(p.pairs.size() == 1);
    CHECK(p.pairs[0].unit_circle);
    CHECK(p.pairs[0].gamma == p.pairs[0].gamma_recip);
    CHECK(std::abs(p.pairs[0].gamma - i) < 1e-15);
  }
  SECTION("unpairable and odd unit-circle inputs") {
    try {
      (void)pair_roots({2.0, 0.25}, 1.0);
      FAIL("expected UnpairableRoots");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::UnpairableRoots);
    }
    try {
      (void)pair_roots({cplx(0.0, 1.0), cplx(-1.0, 0.0)}, 1.0);
      FAIL("expected OddUnitCircleMultiplicity");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::OddUnitCircleMultiplicity);
    }
    CHECK_THROWS_AS(pair_roots({2.0}, 1.0), Error);
  }
  SECTION("planted unit-circle root of a signal") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
      const auto base = test::random_signal(4, rng);
      const cplx on_circle = std::polar(1.0, 0.3 + trial);
      // x * (1, -e^{i theta}) puts a root of X at e^{i theta}.
      std::vector<cplx> x(base.size() + 1);
      for (std::size_t k = 0; k < base.size(); ++k) {
        x[k] += base[k];
        x[k + 1] -= on_circle * base[k];
      }
      const auto p = pairing_from_autocorr(autocorrelation(ComplexSignal(x)));
      const auto flagged = std::count_if(p.pairs.begin(), p.pairs.end(), [](const RootPair& r) { return r.unit_circle; });
      CHECK(flagged == 1);
      CHECK(is_valid_pairing(p));
    }
  }
}

TEST_CASE("signal_from_selection", "[ztransform]") {
  const ZeroPairing single{-2.0, {{2.0, 0.5, false}}};
  const auto a = signal_from_selection(single, {true}, 0.0);
  CHECK(std::abs(a[0] - 1.0) < 1e-15);
  CHECK(std::abs(a[1] + 2.0) < 1e-15);
  const auto b = signal_from_selection(single, {false}, 0.0);
  CHECK(std::abs(b[0] - 2.0) < 1e-15);
  CHECK(std::abs(b[1] + 1.0) < 1e-15);

  const ZeroPairing two{486.0, {{-2.0, -0.5, false}, {-3.0, -1.0 / 3.0, false}}};
  const auto x = signal_from_selection(RootSelection{two, {true, true}, 0.0});
  CHECK(test::max_abs_diff(x.entries(), ComplexSignal{9.0, 45.0, 54.0}.entries()) < 1e-12);

  CHECK_THROWS_AS(signal_from_selection(two, {true}, 0.0), Error);
}

TEST_CASE("ztransform properties", "[ztransform][property]") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> phase(-std::numbers::pi, std::numbers::pi);
  int generic = 0;
  for (int trial = 0; trial < 300 && generic < 150; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 9);
    const auto x = test::random_signal(n, rng);
    const auto r = autocorrelation(x);
    const auto p = pairing_from_autocorr(r);
    if (!test::is_generic(p)) continue;
    ++generic;

    // Pair identity as stored.
    for (const auto& pr : p.pairs) {
      CHECK(pair_residual(pr.gamma, pr.gamma_recip) <= kPairTol * std::max(1.0, std::norm(pr.gamma)));
    }

    // Reconstruction fidelity with ground-truth choices and phase.
    const double alpha = phase(rng);
    const auto rotated = scaled(x, std::polar(1.0, alpha));
    const auto choices = test::truth_choices(x, p);
    const auto rebuilt = signal_from_selection(p, choices, std::arg(rotated[0]));
    CHECK(distance(rebuilt, rotated) <= 1e-7 * norm2(x));

    // Scale recovery.
    CHECK(std::abs(rebuilt[0] * rebuilt[n - 1]) == Approx(std::abs(r(static_cast<long>(n) - 1))).epsilon(1e-8));

    // Magnitude invariance for every selection (N <= 8).
    if (n <= 8) {
      const auto grid = uniform_grid(4 * n);
      const auto target = spectrum_from_autocorr(r, grid);
      const double peak = *std::max_element(target.values.begin(), target.values.end());
      for (std::uint64_t i = 0; i < (std::uint64_t{1} << (n - 1)); ++i) {
        const auto y = signal_from_selection(p, choices_from_index(i, n - 1), 0.0);
        const auto s = fourier_intensity(y, grid);
        for (std::size_t j = 0; j < grid.size(); ++j) CHECK(std::abs(s.values[j] - target.values[j]) <= 1e-7 * peak);
      }
    }
  }
  CHECK(generic >= 100);
}
