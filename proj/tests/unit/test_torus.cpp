#include <doctest.h>

#include <chrono>
#include <cmath>
#include <numbers>

#include "ntrace/linalg/dense.hpp"
#include "ntrace/torus/torus.hpp"

using namespace ntrace;
using namespace ntrace::torus;
using linalg::GaussRational;

namespace {

constexpr double pi = std::numbers::pi;
const linalg::ApproxField af;

GaussRational q(long v) { return GaussRational(v); }

TorusTwist scalar_twist(double a) { return TorusTwist::from_monodromy(ApproxMatrix{{C(a, 0)}}); }

TorusTwist jordan2() { return TorusTwist::from_monodromy(ExactMatrix{{q(1), q(1)}, {q(0), q(1)}}); }

// Σ_n exp(−πn²)·aⁿ summed directly, far past where terms matter.
double direct_theta_sum(double a) {
  long double s = 0;
  for (int n = -60; n <= 60; ++n) s += std::exp(-std::numbers::pi_v<long double> * n * n) * std::pow((long double)a, n);
  return static_cast<double>(s);
}

}  // namespace

TEST_CASE("twist data: branch of theta and the logarithm") {
  auto t = scalar_twist(2.0);
  REQUIRE(t.jordan_data().size() == 1);
  CHECK(t.jordan_data()[0].theta.real() == 0.0);
  CHECK(t.jordan_data()[0].theta.imag() == doctest::Approx(-std::log(2.0) / (2 * pi)));

  auto neg = scalar_twist(-1.0);
  CHECK(neg.jordan_data()[0].theta.real() == doctest::Approx(0.5));

  auto j = jordan2();
  REQUIRE(j.jordan_data().size() == 1);
  CHECK(j.jordan_data()[0].m == 2);
  CHECK(linalg::equal(af, j.exp_generator(1.0), j.monodromy()));
  CHECK(linalg::equal(af, j.exp_generator(0.25) * j.exp_generator(0.75), j.monodromy()));

  CHECK_THROWS_AS(TorusTwist::from_monodromy(ApproxMatrix{{C(0, 0)}}), InvalidModel);
}

TEST_CASE("classical Poisson summation") {
  const double oracle = std::pow(pi, 0.25) / std::tgamma(0.75);
  CHECK(oracle == doctest::Approx(1.0864348112).epsilon(1e-10));
  auto t = scalar_twist(1.0);
  auto f = AnalyticTestFunction::gaussian();
  auto spec = spectral_side_torus(t, f, -1, 1e-14);
  auto geo = geometric_side_torus(t, f, -1, 1e-14);
  CHECK(std::abs(spec.value - oracle) <= 1e-12);
  CHECK(std::abs(geo.value - oracle) <= 1e-12);
}

TEST_CASE("real monodromy a = 2") {
  const double oracle = direct_theta_sum(2.0);
  CHECK(oracle == doctest::Approx(1.1080496169).epsilon(1e-9));
  auto t = scalar_twist(2.0);
  auto f = AnalyticTestFunction::gaussian();
  auto spec = spectral_side_torus(t, f, 8, 1.0);
  auto geo = geometric_side_torus(t, f, 8, 1.0);
  CHECK(std::abs(geo.value - oracle) <= 1e-10);
  CHECK(std::abs(spec.value - oracle) <= 1e-10);
  CHECK(std::abs(spec.value - geo.value) <= 1e-10);
}

TEST_CASE("unipotent Jordan block doubles the classical sum") {
  const double oracle = 2 * std::pow(pi, 0.25) / std::tgamma(0.75);
  auto r = verify_torus(jordan2(), AnalyticTestFunction::gaussian(), {.scenario_id = "jordan"});
  CHECK(r.pass);
  auto geo = geometric_side_torus(jordan2(), AnalyticTestFunction::gaussian(), -1, 1e-13);
  CHECK(std::abs(geo.value - oracle) <= 1e-11);
}

TEST_CASE("bump supported in (-1,1): geometric side is f(0)·dim") {
  auto f = AnalyticTestFunction::bump(1.0);
  CHECK(f(0.0) == 1.0);
  auto t = jordan2();
  auto geo = geometric_side_torus(t, f, -1, 1e-12);
  CHECK(geo.value == C(2.0, 0.0));
  CHECK(geo.tail_bound == 0.0);
  auto spec = spectral_side_torus(t, f, -1, 1e-6);
  CHECK(std::abs(spec.value - C(2.0, 0.0)) <= 1e-6);
  CHECK(std::abs(spec.value - C(2.0, 0.0)) <= spec.tail_bound + 1e-12);
}

TEST_CASE("bump transform: symmetry and total mass") {
  // ∫ bump·exp(2πiξx) is even and real for real ξ; F(0) = ‖f‖₁.
  auto f = AnalyticTestFunction::bump(1.0);
  auto t0 = f.transform(C(0, 0));
  CHECK(t0.value.imag() == doctest::Approx(0.0));
  CHECK(t0.value.real() == doctest::Approx(f.derivative_norms()[0]).epsilon(1e-8));
  auto a = f.transform(C(0.7, 0)), b = f.transform(C(-0.7, 0));
  CHECK(std::abs(a.value - b.value) <= 1e-13);
  CHECK(std::abs(a.value.imag()) <= 1e-13);
}

TEST_CASE("branch choice of theta does not change the spectral side") {
  auto t = scalar_twist(2.0);
  auto f = AnalyticTestFunction::gaussian();
  const C base = spectral_side_torus(t, f, -1, 1e-14).value;
  for (long shift : {-3L, -1L, 1L, 5L}) {
    const C moved = spectral_side_torus(t.with_theta_shift(0, shift), f, -1, 1e-14).value;
    CHECK(std::abs(moved - base) <= 1e-12);
  }
  auto bump = AnalyticTestFunction::bump(1.5);
  const auto b0 = spectral_side_torus(t, bump, -1, 1e-6);
  const auto b1 = spectral_side_torus(t.with_theta_shift(0, 2), bump, -1, 1e-6);
  CHECK(std::abs(b0.value - b1.value) <= b0.tail_bound + b1.tail_bound);
}

TEST_CASE("residuals stay under the certified tails on a grid") {
  const double oracle = direct_theta_sum(1.5);
  auto t = scalar_twist(1.5);
  auto f = AnalyticTestFunction::gaussian();
  double prev_spec = INFINITY, prev_geo = INFINITY;
  for (long c = 0; c <= 8; ++c) {
    auto spec = spectral_side_torus(t, f, c, 1e300);
    auto geo = geometric_side_torus(t, f, c, 1e300);
    CHECK(spec.tail_bound <= prev_spec);
    CHECK(geo.tail_bound <= prev_geo);
    CHECK(std::abs(spec.value - oracle) <= spec.tail_bound + 1e-14);
    CHECK(std::abs(geo.value - oracle) <= geo.tail_bound + 1e-14);
    CHECK(std::abs(spec.value - geo.value) <= spec.tail_bound + geo.tail_bound + 2e-14);
    prev_spec = spec.tail_bound;
    prev_geo = geo.tail_bound;
  }
}

TEST_CASE("direct sums of twists add") {
  ApproxMatrix sum{{C(2, 0), C(0, 0), C(0, 0)}, {C(0, 0), C(0, 1), C(0, 0)}, {C(0, 0), C(0, 0), C(0.5, 0.5)}};
  auto f = AnalyticTestFunction::gaussian(1.2, 0.3);
  auto whole = spectral_side_torus(TorusTwist::from_monodromy(sum), f, -1, 1e-13).value;
  C parts = 0;
  for (C a : {C(2, 0), C(0, 1), C(0.5, 0.5)}) parts += spectral_side_torus(TorusTwist::from_monodromy(ApproxMatrix{{a}}), f, -1, 1e-13).value;
  CHECK(std::abs(whole - parts) <= 1e-12);
  auto r = evaluate_torus(TorusTwist::from_monodromy(sum), f, {.scenario_id = "sum"});
  CHECK_MESSAGE(r.pass, r.dump());
}

TEST_CASE("pairing sign: the minus convention breaks the identity for a non-unitary twist") {
  auto r = evaluate_torus(scalar_twist(2.0), AnalyticTestFunction::gaussian(1.0, 0.3), {.scenario_id = "audit", .pairing = Pairing::Minus});
  CHECK_FALSE(r.pass);
  auto ok = evaluate_torus(scalar_twist(2.0), AnalyticTestFunction::gaussian(1.0, 0.3), {.scenario_id = "plus"});
  CHECK(ok.pass);
}

TEST_CASE("growth beyond the test function is rejected") {
  auto f = AnalyticTestFunction::gaussian(40.0);
  auto r = evaluate_torus(scalar_twist(1e6), f, {.scenario_id = "growth"});
  CHECK_FALSE(r.pass);
  CHECK(r.error.find("GrowthInadmissible") != std::string::npos);
}

TEST_CASE("fixed cutoffs that are too small fail honestly") {
  // Tails above the tolerance cannot certify the comparison.
  auto r = evaluate_torus(scalar_twist(2.0), AnalyticTestFunction::gaussian(3.0), {.scenario_id = "short", .K = 1, .N = 1});
  CHECK_FALSE(r.pass);
}

TEST_CASE("report metadata") {
  auto r = verify_torus(scalar_twist(2.0), AnalyticTestFunction::gaussian(), {.scenario_id = "a2"});
  CHECK(r.case_kind == "torus");
  REQUIRE(r.multiplicities.size() == 1);
  CHECK(r.multiplicities[0].multiplicity == 1);
  CHECK(r.normalization.count("pairing") == 1);
  CHECK(!r.geometric_terms.empty());
}

TEST_CASE("twisted Laplacian: trivial twist at K = 2") {
  auto model = twisted_laplacian_model(scalar_twist(1.0), 2);
  auto ev = linalg::eigenvalues(af, model.delta);
  const double l = 4 * pi * pi;
  std::vector<std::pair<double, std::size_t>> expected = {{0, 1}, {l, 2}, {4 * l, 2}};
  REQUIRE(ev.size() == expected.size());
  for (auto [v, m] : expected) {
    bool found = false;
    for (const auto& e : ev)
      if (std::abs(e.value - C(v, 0)) <= 1e-9 * std::max(1.0, v)) {
        CHECK(e.multiplicity == m);
        found = true;
      }
    CHECK(found);
  }
}

TEST_CASE("twisted Laplacian: a = 2 at K = 1") {
  auto t = scalar_twist(2.0);
  auto check = check_laplacian_spectrum(t, 1);
  CHECK_MESSAGE(check.pass, check.detail);
  CHECK(check.expected_values == 3);
  const C theta = t.jordan_data()[0].theta;
  auto ev = linalg::eigenvalues(af, twisted_laplacian_model(t, 1).delta);
  bool found = false;
  for (const auto& e : ev) found |= std::abs(e.value - std::pow(2 * pi * theta, 2)) <= 1e-9;
  CHECK(found);
}

TEST_CASE("twisted Laplacian: Jordan block at K = 0") {
  // θ = 0 and L is nilpotent, so Δ = (2πL)² = 0: one eigenvalue of multiplicity 2.
  auto t = jordan2();
  auto model = twisted_laplacian_model(t, 0);
  auto ev = linalg::eigenvalues(af, model.delta);
  REQUIRE(ev.size() == 1);
  CHECK(ev[0].multiplicity == 2);
  // The translation generator keeps the single Jordan block of size 2.
  auto g = model.gens[0];
  CHECK(linalg::rank(af, linalg::shifted(af, g, C(1, 0))) == 1);
  CHECK(check_laplacian_spectrum(t, 0).pass);
}

TEST_CASE("twisted Laplacian spectrum up to K = 16") {
  ApproxMatrix w{{C(2, 0), C(1, 0), C(0, 0)}, {C(0, 0), C(2, 0), C(0, 0)}, {C(0, 0), C(0, 0), C(0, -0.5)}};
  auto t = TorusTwist::from_monodromy(w);
  for (std::size_t K : {0u, 1u, 4u, 9u, 16u}) {
    auto start = std::chrono::steady_clock::now();
    auto check = check_laplacian_spectrum(t, K);
    CHECK_MESSAGE(check.pass, "K = ", K, ": ", check.detail);
    CHECK(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() < 10.0);
  }
}
