#include <doctest.h>

#include <random>

#include "ntrace/linalg/eigenspaces.hpp"

using namespace ntrace;
using namespace ntrace::linalg;

namespace {

GaussRational q(const char* s) { return GaussRational::parse(s); }

ExactMatrix jordan(long lambda, std::size_t n) {
  ExactMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = GaussRational(lambda);
    if (i + 1 < n) m(i, i + 1) = GaussRational(1);
  }
  return m;
}

}  // namespace

TEST_CASE("gaussian rational parsing and printing") {
  CHECK(q("1/2+3/4i").str() == "1/2+3/4i");
  CHECK(q("-i").str() == "-i");
  CHECK(q("0.125").str() == "1/8");
  CHECK(q("010/08").str() == "5/4");
  CHECK(q("2-4/6i").str() == "2-2/3i");
  CHECK(q("i*3").str() == "3i");
  CHECK((q("1+i") * q("1-i")).str() == "2");
  CHECK(q("1+i").inverse() == q("1/2-1/2i"));
  CHECK_THROWS_AS(q("1/0"), ParseError);
  CHECK_THROWS_AS(q("1+"), ParseError);
  CHECK_THROWS_AS(GaussRational(0).inverse(), SingularMatrix);
}

TEST_CASE("nullspace") {
  ExactField ef;
  CHECK(nullspace(ef, ExactMatrix::zero(2, 2)) == ExactMatrix::identity(2));
  CHECK(nullspace(ef, ExactMatrix::identity(3)).cols() == 0);
  ExactMatrix ones{{1, 1}, {1, 1}};
  auto k = nullspace(ef, ones);
  REQUIRE(k.cols() == 1);
  CHECK(is_zero(ef, ones * k));
  CHECK(k == ExactMatrix{{-1}, {1}});

  ApproxField af;
  auto ka = nullspace(af, to_approx(ones));
  REQUIRE(ka.cols() == 1);
  CHECK(frobenius_norm(to_approx(ones) * ka) < 1e-12);
}

TEST_CASE("characteristic polynomial") {
  // (x-3)^2 (x-5) = x^3 - 11x^2 + 39x - 45
  auto m = ExactMatrix::direct_sum(jordan(3, 2), ExactMatrix{{5}});
  auto p = characteristic_polynomial(m);
  CHECK(p == std::vector<GaussRational>{GaussRational(-45), GaussRational(39), GaussRational(-11), GaussRational(1)});
}

TEST_CASE("generalized eigenspaces, exact") {
  ExactField ef;
  auto d = generalized_eigenspaces(ef, ExactMatrix{{1, 0}, {0, 2}});
  REQUIRE(d.size() == 2);
  CHECK(d[0].eigenvalue == GaussRational(1));
  CHECK(d[0].block_sizes == std::vector<std::size_t>{1});
  CHECK(d[1].eigenvalue == GaussRational(2));

  auto j = generalized_eigenspaces(ef, jordan(3, 2));
  REQUIRE(j.size() == 1);
  CHECK(j[0].dim() == 2);
  CHECK(j[0].block_sizes == std::vector<std::size_t>{2});
  CHECK(j[0].index == 2);
  auto n = shifted(ef, jordan(3, 2), GaussRational(3));
  CHECK(is_zero(ef, n * n));
  CHECK_FALSE(is_zero(ef, n));

  auto nil = generalized_eigenspaces(ef, jordan(0, 3));
  REQUIRE(nil.size() == 1);
  CHECK(nil[0].block_sizes == std::vector<std::size_t>{3});

  // Gaussian-integer spectrum found without hints.
  ExactMatrix rot{{0, -1}, {1, 0}};
  auto r = generalized_eigenspaces(ef, rot);
  REQUIRE(r.size() == 2);
  CHECK(r[0].eigenvalue == q("-i"));
  CHECK(r[1].eigenvalue == q("i"));

  // x^2 - 2 has no roots in Q(i).
  CHECK_THROWS_AS(generalized_eigenspaces(ef, ExactMatrix{{0, 2}, {1, 0}}), ExactEigenvalueNotInField);
}

TEST_CASE("generalized eigenspaces, approx") {
  ApproxField af;
  auto m = to_approx(ExactMatrix::direct_sum(jordan(4, 2), ExactMatrix{{9}}));
  auto d = generalized_eigenspaces(af, m);
  REQUIRE(d.size() == 2);
  CHECK(std::abs(d[0].eigenvalue - 4.0) < 1e-6);
  CHECK(d[0].block_sizes == std::vector<std::size_t>{2});
  CHECK(d[1].block_sizes == std::vector<std::size_t>{1});

  auto j3 = generalized_eigenspaces(af, to_approx(jordan(2, 3)));
  REQUIRE(j3.size() == 1);
  CHECK(j3[0].block_sizes == std::vector<std::size_t>{3});
}

TEST_CASE("resolvent") {
  ExactField ef;
  CHECK(resolvent(ef, ExactMatrix{{0}}, GaussRational(-1)) == ExactMatrix{{1}});
  CHECK(resolvent(ef, ExactMatrix{{0, 0}, {0, 5}}, GaussRational(-1)) ==
        ExactMatrix{{GaussRational(1), GaussRational(0)}, {GaussRational(0), q("1/6")}});
  CHECK(resolvent(ef, jordan(0, 2), GaussRational(1)) == ExactMatrix{{-1, -1}, {0, -1}});
  CHECK_THROWS_AS(resolvent(ef, jordan(0, 2), GaussRational(0)), SpectralPole);

  ApproxField af;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 100; ++t) {
    ApproxMatrix m(4, 4);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) m(i, j) = {u(rng), u(rng)};
    std::complex<double> lambda{3 * u(rng), 3 * u(rng)};
    auto r = resolvent(af, m, lambda);
    CHECK(equal(af, r * shifted(af, m, lambda), ApproxMatrix::identity(4)));
  }
}

TEST_CASE("intertwiner space") {
  ExactField ef;
  std::vector<ExactMatrix> a{ExactMatrix{{2}}};
  CHECK(intertwiner_space<ExactField>(ef, a, a).size() == 1);
  std::vector<ExactMatrix> plus{ExactMatrix{{1}}}, minus{ExactMatrix{{-1}}};
  CHECK(intertwiner_space<ExactField>(ef, plus, minus).empty());
  std::vector<ExactMatrix> j{jordan(1, 2)};
  auto basis = intertwiner_space<ExactField>(ef, j, j);
  CHECK(basis.size() == 2);
  for (const auto& t : basis) CHECK(t * j[0] == j[0] * t);
}
