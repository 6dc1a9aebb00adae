#include <doctest.h>

#include <random>

#include "ntrace/spectral/spectral.hpp"
#include "ntrace/spectral/subspace.hpp"
#include "random_models.hpp"

using namespace ntrace;
using namespace ntrace::spectral;
using linalg::ApproxMatrix;
using linalg::ExactMatrix;
using linalg::GaussRational;

namespace {

const ExactField ef;
const ApproxField af;

ExactMatrix jordan(long lambda, std::size_t n) {
  ExactMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = GaussRational(lambda);
    if (i + 1 < n) m(i, i + 1) = GaussRational(1);
  }
  return m;
}

AdmissibleModel<ExactField> delta_only(ExactMatrix delta) {
  AdmissibleModel<ExactField> m;
  m.gens = {ExactMatrix::identity(delta.rows())};
  m.delta = std::move(delta);
  m.label = "delta";
  return m;
}

AdmissibleModel<ExactField> action(std::vector<ExactMatrix> gens) {
  AdmissibleModel<ExactField> m;
  m.delta = gens[0];
  m.gens = std::move(gens);
  m.label = "action";
  return m;
}

}  // namespace

TEST_CASE("spectrum") {
  auto s = spectrum(ef, delta_only(ExactMatrix{{0, 0}, {0, 1}}));
  REQUIRE(s.size() == 2);
  auto j = spectrum(ef, delta_only(ExactMatrix::direct_sum(jordan(4, 2), ExactMatrix{{9}})));
  REQUIRE(j.size() == 2);
  CHECK(j[0].value == GaussRational(4));
  CHECK(j[0].data.block_sizes == std::vector<std::size_t>{2});
  CHECK(j[1].data.block_sizes == std::vector<std::size_t>{1});
  auto z = spectrum(ef, delta_only(ExactMatrix::zero(3, 3)));
  REQUIRE(z.size() == 1);
  CHECK(z[0].data.dim() == 3);
}

TEST_CASE("direct spectral projection") {
  CHECK(spectral_projection_direct(ef, delta_only(ExactMatrix{{0, 0}, {0, 5}}), GaussRational(0)) ==
        ExactMatrix{{1, 0}, {0, 0}});
  auto p = spectral_projection_direct(ef, delta_only(ExactMatrix::direct_sum(jordan(1, 2), ExactMatrix{{2}})),
                                      GaussRational(1));
  CHECK(p == ExactMatrix{{1, 0, 0}, {0, 1, 0}, {0, 0, 0}});
  CHECK(p * p == p);
  CHECK(spectral_projection_direct(ef, delta_only(ExactMatrix{{7}}), GaussRational(7)) == ExactMatrix{{1}});
  CHECK_THROWS_AS(spectral_projection_direct(ef, delta_only(ExactMatrix{{7}}), GaussRational(6)), SigmaNotSpectral);
}

TEST_CASE("power-iteration projector") {
  auto approx = [](const ExactMatrix& d) { return testing::to_approx(delta_only(d)); };
  auto p = spectral_projection_power_iteration(af, approx(ExactMatrix{{0, 0}, {0, 5}}), 0.0, -1.0, 1u << 20, 1e-12);
  CHECK(linalg::equal(af, p, ApproxMatrix{{1.0, 0.0}, {0.0, 0.0}}));

  PowerIterationInfo info;
  auto id = spectral_projection_power_iteration(af, approx(jordan(0, 2)), 0.0, -0.1, 1u << 20, 1e-12, &info);
  CHECK(linalg::frobenius_norm(id - ApproxMatrix::identity(2)) < 1e-10);
  CHECK(info.nilpotent_depth == 2);

  auto m = approx(ExactMatrix::direct_sum(jordan(0, 2), ExactMatrix{{3}}));
  auto pi = spectral_projection_power_iteration(af, m, 0.0, -0.1, 1u << 20, 1e-12);
  CHECK(linalg::frobenius_norm(pi - spectral_projection_direct(af, m, 0.0)) < 1e-10);

  CHECK_THROWS_AS(spectral_projection_power_iteration(af, m, 0.0, 2.0, 1u << 20, 1e-12), BadLambda);
  CHECK_THROWS_AS(spectral_projection_power_iteration(af, m, 0.0, 3.0, 1u << 20, 1e-12), BadLambda);
  CHECK_THROWS_AS(spectral_projection_power_iteration(af, m, 0.0, 1.45, 8, 1e-12), SlowContraction);
}

TEST_CASE("composition series") {
  // Standard representation of S3: irreducible.
  ExactMatrix r{{0, -1}, {1, -1}}, s{{0, 1}, {1, 0}};
  auto irr = composition_series(ef, action({r, s}));
  CHECK(irr.length() == 1);
  CHECK(irr.dims == std::vector<std::size_t>{0, 2});

  auto j = composition_series(ef, action({jordan(1, 2)}));
  REQUIRE(j.length() == 2);
  CHECK(j.basis.col(0) == ExactMatrix{{1}, {0}});
  CHECK(j.class_rep.size() == 1);

  // Two characters: the pivot rule takes the lowest Δ-eigenvalue first.
  auto two = composition_series(ef, action({ExactMatrix{{3, 0}, {0, -1}}}));
  REQUIRE(two.length() == 2);
  CHECK(two.factors[0].gens[0] == ExactMatrix{{-1}});
  CHECK(two.factors[1].gens[0] == ExactMatrix{{3}});
  CHECK(two.class_rep.size() == 2);
}

TEST_CASE("multiplicity and random filtrations") {
  ExactMatrix r{{0, -1}, {1, -1}}, s{{0, 1}, {1, 0}};
  auto std_rep = action({r, s});
  auto pi = make_pi_class(ef, std_rep);
  CHECK(multiplicity(ef, std_rep, pi) == 1);

  auto j = action({jordan(1, 2)});
  auto one = make_pi_class(ef, action({ExactMatrix{{1}}}));
  CHECK(multiplicity(ef, j, one) == 2);
  auto rj = random_pi_filtration_length(ef, j, one, 10, 42);
  CHECK(rj.certified);
  CHECK(rj.length == 2);

  auto other = make_pi_class(ef, action({ExactMatrix{{5}}}));
  CHECK(multiplicity(ef, j, other) == 0);

  auto sum = action({ExactMatrix{{2, 0}, {0, 3}}});
  auto chi1 = make_pi_class(ef, action({ExactMatrix{{2}}}));
  auto rs = random_pi_filtration_length(ef, sum, chi1, 10, 7);
  CHECK(rs.length == 1);

  CHECK_THROWS_AS(make_pi_class(ef, j), NonIrreduciblePi);
}

TEST_CASE("spectral trace") {
  auto j = action({jordan(1, 2)});
  CHECK(spectral_trace(ef, j, ExactMatrix::identity(2)) == GaussRational(2));
  CHECK(spectral_trace(ef, j, jordan(1, 2)) == GaussRational(2));
  CHECK(spectral_trace(ef, j, ExactMatrix::zero(2, 2)) == GaussRational(0));
  CHECK_THROWS_AS(spectral_trace(ef, j, ExactMatrix{{0, 0}, {1, 0}}), NotStable);
}

TEST_CASE("sub-quotient spectra") {
  AdmissibleModel<ExactField> m;
  m.gens = {ExactMatrix::identity(2)};
  m.delta = jordan(0, 2);
  auto e1 = ExactMatrix{{1}, {0}};
  auto rep = subquotient_spectrum_check(ef, m, ExactMatrix(2, 0), e1);
  REQUIRE(rep.rows.size() == 1);
  CHECK(rep.rows[0].dim_v1 == 1);
  CHECK(rep.rows[0].dim_s == 1);
  CHECK(rep.pass);
  auto same = subquotient_spectrum_check(ef, m, e1, e1);
  CHECK(same.rows[0].dim_s == 0);
  CHECK(subquotient_spectrum_check(ef, m, ExactMatrix(2, 0), ExactMatrix::identity(2)).pass);
  CHECK_THROWS_AS(subquotient_spectrum_check(ef, m, ExactMatrix(2, 0), ExactMatrix{{0}, {1}}), NotStable);
}

TEST_CASE("random modules: series, multiplicities, traces") {
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 10; ++t) {
    auto rm = testing::random_module(rng, 8, 1 + t % 3);
    auto series = composition_series(ef, rm.model);
    std::size_t total = 0;
    for (const auto& f : series.factors) total += f.dim();
    CHECK(total == rm.model.dim());
    CHECK(series.length() == rm.block_types.size());
    auto f_op = testing::random_algebra_element(rng, rm.model.gens);
    CHECK(spectral_trace(ef, series, f_op) == f_op.trace());
  }
}
