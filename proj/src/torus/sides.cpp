#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "ntrace/linalg/dense.hpp"
#include "ntrace/torus/torus.hpp"

namespace ntrace::torus {

namespace {

constexpr double pi = std::numbers::pi;
constexpr long kMaxCutoff = 100000;

std::string number_text(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// Σ_{n ≥ n0} t(n) for a log-concave t: explicit terms until the ratio drops
// below 1/2 past the peak, then a geometric bound for the rest.
template <class Term>
double log_concave_tail(Term t, long n0) {
  double sum = 0;
  double prev = t(n0);
  for (long n = n0; n < n0 + 10 * kMaxCutoff; ++n) {
    if (!std::isfinite(prev)) throw GrowthInadmissible("tail terms overflow: the test function does not dominate the twist");
    sum += prev;
    const double next = t(n + 1);
    if (next == 0) return sum;
    const double r = next / prev;
    if (r < 0.5) return sum + next / (1 - r);
    prev = next;
  }
  throw GrowthInadmissible("tail terms do not decay within reach");
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Σ_{i ≥ 0} (d + i)^{−p} ≤ d^{−p} + d^{1−p}/(p − 1) for d > 0, p ≥ 2.
double power_tail(double d, unsigned p) { return std::pow(d, -static_cast<double>(p)) * (1 + d / (p - 1)); }

double gaussian_spectral_tail(const TorusTwist& twist, const AnalyticTestFunction& f, long K, Pairing pairing) {
  double tail = 0;
  for (const auto& d : twist.jordan_data()) {
    auto term = [&](long k) { return std::abs(f.transform(d.theta + static_cast<double>(k), pairing).value); };
    tail += static_cast<double>(d.m) * (log_concave_tail(term, K + 1) + log_concave_tail([&](long k) { return term(-k); }, K + 1));
  }
  return tail;
}

double bump_spectral_tail(const TorusTwist& twist, const AnalyticTestFunction& f, long K) {
  const auto& norms = f.derivative_norms();
  double tail = 0;
  for (const auto& d : twist.jordan_data()) {
    const double lo = static_cast<double>(K + 1) + d.theta.real(), hi = static_cast<double>(K + 1) - d.theta.real();
    if (lo <= 0 || hi <= 0) return std::numeric_limits<double>::infinity();
    // Integration by parts p times: |F(ξ)| ≤ ‖f^(p)‖₁·exp(2π|Im ξ|B)/(2π|Re ξ|)^p.
    double best = std::numeric_limits<double>::infinity();
    for (unsigned p = 2; p < norms.size(); ++p)
      best = std::min(best, norms[p] * std::pow(2 * pi, -static_cast<double>(p)) * (power_tail(lo, p) + power_tail(hi, p)));
    tail += static_cast<double>(d.m) * std::exp(2 * pi * std::abs(d.theta.imag()) * f.radius()) * best;
  }
  return tail;
}

double spectral_tail(const TorusTwist& twist, const AnalyticTestFunction& f, long K, Pairing pairing) {
  return f.kind() == AnalyticTestFunction::Kind::Gaussian ? gaussian_spectral_tail(twist, f, K, pairing)
                                                          : bump_spectral_tail(twist, f, K);
}

// Smallest cutoff in [lo, kMaxCutoff] with bound(cutoff) ≤ target, for a non-increasing bound.
template <class Bound>
long smallest_cutoff(Bound bound, long lo, double target, const char* side) {
  long hi = std::max(lo, 1L);
  while (bound(hi) > target) {
    if (hi >= kMaxCutoff)
      throw TailBoundExceedsTolerance(std::string(side) + " tail bound stays above " + number_text(target) +
                                      " up to cutoff " + std::to_string(kMaxCutoff));
    lo = hi + 1;
    hi = std::min(2 * hi, kMaxCutoff);
  }
  while (lo < hi) {
    const long mid = lo + (hi - lo) / 2;
    if (bound(mid) <= target)
      hi = mid;
    else
      lo = mid + 1;
  }
  return hi;
}

double spectral_radius(const TorusTwist& twist, bool inverse) {
  double r = 0;
  for (const auto& d : twist.jordan_data()) r = std::max(r, inverse ? 1 / std::abs(d.a) : std::abs(d.a));
  return r;
}

double geometric_tail(const TorusTwist& twist, const AnalyticTestFunction& f, long N) {
  const double dim = static_cast<double>(twist.dim());
  double tail = 0;
  for (int side : {1, -1}) {
    // |tr ω(1)ⁿ| ≤ dim·ρⁿ with ρ the spectral radius of ω(1)^{±1}.
    const double log_rho = std::log(spectral_radius(twist, side < 0));
    if (f.kind() == AnalyticTestFunction::Kind::Bump) {
      for (long n = N + 1; static_cast<double>(n) < f.radius(); ++n)
        tail += dim * f(static_cast<double>(side * n)) * std::exp(static_cast<double>(n) * log_rho);
      continue;
    }
    const double s = f.width(), c = side * f.center();
    const double peak = c + s * s * log_rho / (2 * pi);
    if (peak > static_cast<double>(kMaxCutoff))
      throw GrowthInadmissible("f(n)·|a|^n peaks near n = " + std::to_string(peak) + ": the Gaussian does not dominate the twist");
    tail += log_concave_tail(
        [&](long n) {
          const double u = (static_cast<double>(n) - c) / s;
          return dim * std::exp(-pi * u * u + static_cast<double>(n) * log_rho);
        },
        N + 1);
  }
  return tail;
}

}  // namespace

SideValue spectral_side_torus(const TorusTwist& twist, const AnalyticTestFunction& f, long K, double target_tail,
                              Pairing pairing) {
  if (K < 0) {
    // Quadrature error is added separately, so the truncation gets a share of the target.
    K = smallest_cutoff([&](long k) { return spectral_tail(twist, f, k, pairing); }, 0, 0.5 * target_tail, "spectral");
  }
  SideValue out;
  out.cutoff = K;
  out.tail_bound = spectral_tail(twist, f, K, pairing);
  for (const auto& d : twist.jordan_data()) {
    // Small terms first: |k| descending.
    C partial = 0;
    auto add = [&](long k) {
      auto t = f.transform(d.theta + static_cast<double>(k), pairing);
      if (!std::isfinite(t.value.real()) || !std::isfinite(t.value.imag()))
        throw GrowthInadmissible("transform overflows at parameter " + linalg::scalar_text(d.theta + static_cast<double>(k)));
      partial += t.value;
      out.tail_bound += static_cast<double>(d.m) * t.error;
    };
    for (long a = K; a >= 1; --a) {
      add(a);
      add(-a);
    }
    add(0);
    out.value += static_cast<double>(d.m) * partial;
  }
  if (out.tail_bound > target_tail)
    throw TailBoundExceedsTolerance("spectral tail bound " + number_text(out.tail_bound) + " at K = " +
                                    std::to_string(K) + " exceeds " + number_text(target_tail));
  return out;
}

SideValue geometric_side_torus(const TorusTwist& twist, const AnalyticTestFunction& f, long N, double target_tail) {
  if (N < 0) {
    const long floor_n = f.kind() == AnalyticTestFunction::Kind::Bump ? static_cast<long>(std::ceil(f.radius())) : 0;
    N = smallest_cutoff([&](long n) { return geometric_tail(twist, f, n); }, floor_n, target_tail, "geometric");
  }
  SideValue out;
  out.cutoff = N;
  out.tail_bound = geometric_tail(twist, f, N);
  // tr ω(1)ⁿ from successive matrix powers, small terms first.
  std::vector<C> pos(static_cast<std::size_t>(N) + 1), neg(static_cast<std::size_t>(N) + 1);
  ApproxMatrix up = ApproxMatrix::identity(twist.dim()), down = up;
  const ApproxMatrix w = twist.monodromy_power(1), w_inv = twist.monodromy_power(-1);
  for (long n = 0; n <= N; ++n) {
    pos[static_cast<std::size_t>(n)] = up.trace();
    neg[static_cast<std::size_t>(n)] = down.trace();
    up = up * w;
    down = down * w_inv;
  }
  for (long n = N; n >= 0; --n) {
    const double fp = f(static_cast<double>(n)), fm = f(static_cast<double>(-n));
    if (fp != 0) out.value += fp * pos[static_cast<std::size_t>(n)];
    if (n > 0 && fm != 0) out.value += fm * neg[static_cast<std::size_t>(n)];
  }
  if (!std::isfinite(out.value.real()) || !std::isfinite(out.value.imag()))
    throw GrowthInadmissible("geometric terms overflow");
  if (out.tail_bound > target_tail)
    throw TailBoundExceedsTolerance("geometric tail bound " + number_text(out.tail_bound) + " at N = " +
                                    std::to_string(N) + " exceeds " + number_text(target_tail));
  return out;
}

TraceReport evaluate_torus(const TorusTwist& twist, const AnalyticTestFunction& f, const TorusOptions& options) {
  using linalg::scalar_text;
  TraceReport report;
  report.scenario_id = options.scenario_id;
  report.case_kind = "torus";
  report.backend = "approx";
  report.normalization = {
      {"haar", "Lebesgue measure on R, covolume of Z equal to 1"},
      {"orbital", "point evaluation O_n(f) = f(n), vol = 1"},
      {"pairing", options.pairing == Pairing::Plus ? "F(xi) = int f(x) exp(+2 pi i xi x) dx"
                                                   : "F(xi) = int f(x) exp(-2 pi i xi x) dx (audit)"},
      {"branch", "theta = log(a)/(2 pi i), Re theta in [0,1)"},
  };
  report.parameters = {{"test_function", f.describe()}, {"twist_dim", std::to_string(twist.dim())}};
  auto text = [](double v) { return scalar_text(C(v, 0)); };
  report.parameters["tolerance"] = text(options.tolerance);
  try {
    // Automatic cutoffs aim each tail at a tenth of the tolerance; fixed ones
    // must still keep each tail within the tolerance.
    const double target = options.tolerance > 0 ? 0.1 * options.tolerance : 1e-13;
    const double fixed_target = options.tolerance > 0 ? options.tolerance : 1e-13;
    auto t0 = std::chrono::steady_clock::now();
    const auto spec = spectral_side_torus(twist, f, options.K, options.K < 0 ? target : fixed_target, options.pairing);
    report.timings.emplace_back("spectral", seconds_since(t0));
    t0 = std::chrono::steady_clock::now();
    const auto geo = geometric_side_torus(twist, f, options.N, options.N < 0 ? target : fixed_target);
    report.timings.emplace_back("geometric", seconds_since(t0));

    report.parameters["K"] = std::to_string(spec.cutoff);
    report.parameters["N"] = std::to_string(geo.cutoff);
    report.spectral_side = scalar_text(spec.value);
    report.geometric_side = scalar_text(geo.value);
    report.tail_bound_spectral = spec.tail_bound;
    report.tail_bound_geometric = geo.tail_bound;

    for (const auto& d : twist.jordan_data()) {
      MultiplicityRow row;
      row.label = "characters exp(2 pi i (theta+k) x), a = " + scalar_text(d.a) + ", theta = " + scalar_text(d.theta);
      row.dim = 1;
      row.multiplicity = d.m;
      C partial = 0;
      for (long k = -spec.cutoff; k <= spec.cutoff; ++k)
        partial += f.transform(d.theta + static_cast<double>(k), options.pairing).value;
      row.trace = scalar_text(partial);
      report.multiplicities.push_back(std::move(row));
    }
    for (long n = -geo.cutoff; n <= geo.cutoff; ++n) {
      const double fn = f(static_cast<double>(n));
      if (fn == 0) continue;
      const C tr = twist.monodromy_power(n).trace();
      report.geometric_terms.push_back({std::to_string(n), "1", text(fn), scalar_text(tr), scalar_text(fn * tr)});
    }

    TraceCheck c;
    c.name = "spectral = geometric";
    c.lhs = report.spectral_side;
    c.rhs = report.geometric_side;
    c.residual = std::abs(spec.value - geo.value);
    c.tolerance = options.tolerance;
    c.tail_bound = spec.tail_bound + geo.tail_bound;
    c.pass = options.tolerance > 0 && c.residual <= c.tolerance + c.tail_bound;
    c.provenance = options.tolerance > 0
                       ? "absolute tolerance; tails certified from Gaussian decay or integration-by-parts bounds plus "
                         "quadrature error estimates"
                       : "tolerance 0 demands exact equality, which truncated floating-point sums cannot certify";
    report.checks.push_back(c);
    report.pass = c.pass;
    if (!c.pass && options.tolerance <= 0)
      report.error = "TraceMismatch: " + c.provenance;
    else if (!c.pass)
      report.error = "TraceMismatch: residual " + text(c.residual) + " exceeds tolerance " + text(c.tolerance) +
                     " + tails " + text(c.tail_bound);
  } catch (const Error& e) {
    report.pass = false;
    report.error = e.what();
  }
  return report;
}

TraceReport verify_torus(const TorusTwist& twist, const AnalyticTestFunction& f, const TorusOptions& options) {
  auto report = evaluate_torus(twist, f, options);
  if (!report.pass) throw TraceMismatch(report.dump());
  return report;
}

}  // namespace ntrace::torus
