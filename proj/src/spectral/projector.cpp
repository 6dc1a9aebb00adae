#include <cmath>
#include <limits>

#include <Eigen/LU>
#include <boost/multiprecision/cpp_complex.hpp>
#include <boost/multiprecision/eigen.hpp>

#include "ntrace/linalg/eigen_bridge.hpp"
#include "ntrace/spectral/spectral.hpp"
#include "ntrace/spectral/subspace.hpp"

namespace ntrace::spectral {

namespace {

template <Field F>
using Mat = MatrixOf<F>;

// Index of the spectral value matching sigma0, or npos.
template <Field F>
std::size_t locate(const F& f, const std::vector<SpectralValue<F>>& spec, const typename F::Scalar& sigma0) {
  std::size_t best = static_cast<std::size_t>(-1);
  if constexpr (F::is_exact) {
    for (std::size_t i = 0; i < spec.size(); ++i)
      if (spec[i].value == sigma0) best = i;
  } else {
    double dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < spec.size(); ++i) {
      double d = std::abs(spec[i].value - sigma0);
      // Defective eigenvalues are only located to about sqrt(u)·|σ|.
      if (d <= std::max(1e-6 * std::max(1.0, std::abs(sigma0)), 10 * f.eps) && d < dist) {
        dist = d;
        best = i;
      }
    }
  }
  return best;
}

using Quad = boost::multiprecision::cpp_complex_quad;
using QuadMatrix = Eigen::Matrix<Quad, Eigen::Dynamic, Eigen::Dynamic>;

Quad to_quad(std::complex<double> z) { return Quad(z.real(), z.imag()); }

QuadMatrix to_quad(const Eigen::MatrixXcd& m) {
  return m.unaryExpr([](const std::complex<double>& z) { return to_quad(z); });
}

Eigen::MatrixXcd to_double(const QuadMatrix& m) {
  return m.unaryExpr([](const Quad& z) {
    return std::complex<double>(z.real().convert_to<double>(), z.imag().convert_to<double>());
  });
}

Quad binomial(std::uint64_t n, std::size_t k) {
  Quad r(1);
  for (std::size_t i = 1; i <= k; ++i) r = r * Quad(n - k + i) / Quad(i);
  return r;
}

}  // namespace

template <Field F>
void AdmissibleModel<F>::validate(const F& f) const {
  const std::size_t d = dim();
  if (d == 0) throw InvalidModel("model '" + label + "' has dimension 0");
  for (const auto& g : gens) {
    if (!g.is_square() || g.rows() != d) throw InvalidModel("generator of shape " + g.shape() + " in model '" + label + "'");
    if (!linalg::is_invertible(f, g)) throw InvalidModel("singular generator image in model '" + label + "'");
  }
  if (delta.rows() != 0 && (delta.rows() != d || delta.cols() != d))
    throw InvalidModel("delta of shape " + delta.shape() + " in model '" + label + "'");
  for (const auto& l : resolvent_sample) {
    if (!has_delta()) throw InvalidModel("resolvent sample without delta in model '" + label + "'");
    if (!linalg::is_invertible(f, linalg::shifted(f, delta, l)))
      throw InvalidModel("resolvent sample " + linalg::scalar_text(l) + " lies on the spectrum of delta");
  }
}

template <Field F>
std::vector<SpectralValue<F>> spectrum(const F& f, const AdmissibleModel<F>& model) {
  if (!model.has_delta()) throw InvalidModel("model '" + model.label + "' has no delta");
  std::vector<SpectralValue<F>> out;
  for (auto& g : linalg::generalized_eigenspaces(f, model.delta, std::span<const typename F::Scalar>(model.spectrum_hint)))
    out.push_back({g.eigenvalue, std::move(g)});
  return out;
}

template <Field F>
MatrixOf<F> spectral_projection_direct(const F& f, const AdmissibleModel<F>& model, const typename F::Scalar& sigma0) {
  auto spec = spectrum(f, model);
  const std::size_t idx = locate(f, spec, sigma0);
  if (idx == static_cast<std::size_t>(-1))
    throw SigmaNotSpectral(linalg::scalar_text(sigma0) + " is not a spectral value of delta");
  std::vector<Mat<F>> parts;
  std::size_t before = 0;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    if (i < idx) before += spec[i].data.dim();
    parts.push_back(spec[i].data.basis);
  }
  const std::size_t d = model.dim();
  auto b = Mat<F>::hstack(std::span<const Mat<F>>(parts), d);
  Mat<F> sel(d, d);
  for (std::size_t k = 0; k < spec[idx].data.dim(); ++k) sel(before + k, before + k) = f.from_int(1);
  return b * sel * linalg::inverse(f, b);
}

MatrixOf<ApproxField> spectral_projection_power_iteration(const ApproxField& f, const AdmissibleModel<ApproxField>& model,
                                                          std::complex<double> sigma0, std::complex<double> lambda,
                                                          std::uint64_t n_max, double tol, PowerIterationInfo* info) {
  auto spec = spectrum(f, model);
  const std::size_t idx = locate(f, spec, sigma0);
  if (idx == static_cast<std::size_t>(-1))
    throw SigmaNotSpectral(linalg::scalar_text(sigma0) + " is not a spectral value of delta");
  // The caller's σ₀ is kept: a defective cluster mean is only accurate to about
  // sqrt(u), and T must be unipotent on V(Δ,σ₀) to that precision.
  const double to_target = std::abs(lambda - sigma0);
  double rho = 0;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const double to_other = std::abs(lambda - spec[i].value);
    if (to_other <= 10 * f.eps * std::max(1.0, std::abs(lambda)))
      throw BadLambda("lambda " + linalg::scalar_text(lambda) + " lies on the spectrum");
    if (i == idx) continue;
    if (!(to_target < to_other))
      throw BadLambda("lambda " + linalg::scalar_text(lambda) + " is not strictly closer to " +
                      linalg::scalar_text(sigma0) + " than to " + linalg::scalar_text(spec[i].value));
    rho = std::max(rho, to_target / to_other);
  }

  const std::size_t d = model.dim();
  const std::size_t depth = spec[idx].data.index;  // S^depth P = 0
  const auto dd = static_cast<Eigen::Index>(d);

  // The peel cancels terms of size binom(n, N−1)·‖S‖^{N−1}, so the iteration
  // runs in quad precision and only the projector is rounded back.
  const QuadMatrix delta = to_quad(linalg::to_eigen(model.delta));
  const Quad s0 = to_quad(sigma0), lam = to_quad(lambda);
  Eigen::PartialPivLU<QuadMatrix> lu(delta - lam * QuadMatrix::Identity(dd, dd));
  const QuadMatrix t = (s0 - lam) * lu.inverse();
  const QuadMatrix s = t - QuadMatrix::Identity(dd, dd);
  std::vector<QuadMatrix> s_pow{QuadMatrix::Identity(dd, dd)};
  for (std::size_t j = 1; j < depth; ++j) s_pow.push_back(s_pow.back() * s);

  // S^j P = S^j Tⁿ − Σ_{k>j} binom(n, k−j) S^k P, for j = N−1 down to 0.
  auto peel = [&](const QuadMatrix& tn, std::uint64_t n) {
    std::vector<QuadMatrix> sp(depth);
    for (std::size_t j = depth; j-- > 0;) {
      QuadMatrix acc = s_pow[j] * tn;
      for (std::size_t k = j + 1; k < depth; ++k) acc -= binomial(n, k - j) * sp[k];
      sp[j] = std::move(acc);
    }
    return sp[0];
  };

  // The complement of Tⁿ decays like rho^n·n^N.
  std::uint64_t n = 1;
  QuadMatrix tn = t;
  auto tail = [&] {
    return std::pow(rho, static_cast<double>(n)) * std::pow(static_cast<double>(n), static_cast<double>(depth));
  };
  while (tail() > 1e-3 * tol) {
    if (n > n_max / 2)
      throw SlowContraction("no convergence after n = " + std::to_string(n) + " (contraction factor " +
                            std::to_string(rho) + ")");
    tn = tn * tn;
    n *= 2;
  }
  if (info) *info = {n, rho, depth};
  return linalg::from_eigen(to_double(peel(tn, n)));
}

template <Field F>
SubquotientReport<F> subquotient_spectrum_check(const F& f, const AdmissibleModel<F>& model, const MatrixOf<F>& v0,
                                                const MatrixOf<F>& v1) {
  if (!model.has_delta()) throw InvalidModel("model '" + model.label + "' has no delta");
  std::vector<Mat<F>> ops = model.gens;
  ops.push_back(model.delta);
  const std::size_t d = model.dim();
  if (v0.rows() != d || v1.rows() != d) throw DimensionMismatch("subspace bases must have " + std::to_string(d) + " rows");
  if (!is_stable<F>(f, ops, v0)) throw NotStable("V0 is not stable under the generators and delta");
  if (!is_stable<F>(f, ops, v1)) throw NotStable("V1 is not stable under the generators and delta");

  auto full = spectrum(f, model);
  std::vector<typename F::Scalar> hints;
  for (const auto& s : full) hints.push_back(s.value);

  // Each eigenvalue of a restriction is attributed to the nearest value of Spec(Δ).
  auto dims_per_value = [&](const Mat<F>& m) {
    std::vector<std::size_t> out(full.size(), 0);
    if (m.rows() == 0) return out;
    for (const auto& ev : linalg::eigenvalues(f, m, std::span<const typename F::Scalar>(hints))) {
      std::size_t best = 0;
      double dist = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < full.size(); ++i) {
        double dd = std::abs(f.to_complex(ev.value) - f.to_complex(full[i].value));
        if (dd < dist) {
          dist = dd;
          best = i;
        }
      }
      out[best] += ev.multiplicity;
    }
    return out;
  };

  const auto v1_basis = v1.cols() ? linalg::column_basis(f, v1) : v1;
  const auto v0_basis = v0.cols() ? linalg::column_basis(f, v0) : v0;
  Mat<F> d1 = v1_basis.cols() ? restrict_to(f, v1_basis, model.delta) : Mat<F>();
  Mat<F> d0 = v0_basis.cols() ? restrict_to(f, v0_basis, model.delta) : Mat<F>();
  Mat<F> ds;
  if (v1_basis.cols() > v0_basis.cols()) {
    Mat<F> inner;
    try {
      inner = v0_basis.cols() ? linalg::coordinates(f, v1_basis, v0_basis) : Mat<F>(v1_basis.cols(), 0);
    } catch (const NotInSpan&) {
      throw NotStable("V0 is not contained in V1");
    }
    ds = quotient_action(f, adapted_basis(f, inner), v0_basis.cols(), d1);
  } else if (v1_basis.cols() < v0_basis.cols()) {
    throw NotStable("V0 is not contained in V1");
  }

  auto n1 = dims_per_value(d1), n0 = dims_per_value(d0), ns = dims_per_value(ds);
  SubquotientReport<F> report;
  for (std::size_t i = 0; i < full.size(); ++i) {
    report.rows.push_back({full[i].value, n1[i], n0[i], ns[i]});
    if (ns[i] + n0[i] != n1[i]) report.pass = false;
  }
  return report;
}

template struct AdmissibleModel<ExactField>;
template struct AdmissibleModel<ApproxField>;

#define NTRACE_INSTANTIATE(F)                                                                                \
  template std::vector<SpectralValue<F>> spectrum<F>(const F&, const AdmissibleModel<F>&);                     \
  template MatrixOf<F> spectral_projection_direct<F>(const F&, const AdmissibleModel<F>&,                      \
                                                     const typename F::Scalar&);                               \
  template SubquotientReport<F> subquotient_spectrum_check<F>(const F&, const AdmissibleModel<F>&,             \
                                                              const MatrixOf<F>&, const MatrixOf<F>&);

NTRACE_INSTANTIATE(ExactField)
NTRACE_INSTANTIATE(ApproxField)

}  // namespace ntrace::spectral
