#include "ntrace/linalg/eigenspaces.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "ntrace/linalg/eigen_bridge.hpp"

namespace ntrace::linalg {

namespace {

using Q = GaussRational;

Q evaluate(const std::vector<Q>& p, const Q& x) {
  Q acc(0);
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
  return acc;
}

// p / (x − c), assuming c is a root.
std::vector<Q> deflate(const std::vector<Q>& p, const Q& c) {
  const std::size_t n = p.size() - 1;
  std::vector<Q> q(n);
  Q carry(0);
  for (std::size_t k = n; k-- > 0;) {
    carry = p[k + 1] + carry * c;
    q[k] = carry;
  }
  return q;
}

struct ExactSearch {
  std::vector<EigenvalueCount<Q>> found;
  std::size_t remaining_degree = 0;
};

ExactSearch search_exact(const ExactMatrix& m, std::span<const Q> hints) {
  if (!m.is_square()) throw DimensionMismatch("eigenvalues of non-square " + m.shape());
  auto p = characteristic_polynomial(m);
  ExactSearch out;
  auto try_root = [&](const Q& c) {
    if (p.size() <= 1) return;
    for (const auto& e : out.found)
      if (e.value == c) return;
    std::size_t mult = 0;
    while (p.size() > 1 && evaluate(p, c).is_zero()) {
      p = deflate(p, c);
      ++mult;
    }
    if (mult) out.found.push_back({c, mult});
  };
  for (const auto& h : hints) try_root(h);
  // A single eigenvalue is tr/n.
  if (p.size() > 1 && m.rows() > 0) try_root(m.trace() * GaussRational(mpq_class(1, static_cast<long>(m.rows()))));
  if (p.size() > 1) {
    // Cluster means first: a defective eigenvalue of multiplicity k is split
    // by about u^{1/k}, but the mean of its cluster stays accurate.
    std::vector<std::complex<double>> guesses;
    try {
      for (const auto& c : eigenvalues(ApproxField{}, to_approx(m))) guesses.push_back(c.value);
    } catch (const NonConvergence&) {
    }
    for (const auto& z : raw_eigenvalues(to_approx(m))) guesses.push_back(z);
    for (const auto& z : guesses) {
      for (const auto& c : rational_candidates(z, 1e-3 * std::max(1.0, std::abs(z)))) {
        try_root(c);
        if (p.size() <= 1) break;
      }
      if (p.size() <= 1) break;
    }
  }
  out.remaining_degree = p.size() - 1;
  std::sort(out.found.begin(), out.found.end(),
            [](const auto& a, const auto& b) { return spectral_less(a.value, b.value); });
  return out;
}

}  // namespace

bool spectral_less(const GaussRational& a, const GaussRational& b) { return lex_less(a, b); }

bool spectral_less(const std::complex<double>& a, const std::complex<double>& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

std::vector<EigenvalueCount<GaussRational>> eigenvalues(const ExactField&, const ExactMatrix& m,
                                                        std::span<const GaussRational> hints) {
  auto res = search_exact(m, hints);
  if (res.remaining_degree > 0)
    throw ExactEigenvalueNotInField(std::to_string(res.remaining_degree) + " of " + std::to_string(m.rows()) +
                                    " eigenvalues are not in Q(i); supply hints or use the approx backend");
  return res.found;
}

std::vector<EigenvalueCount<GaussRational>> in_field_eigenvalues(const ExactField&, const ExactMatrix& m,
                                                                 std::span<const GaussRational> hints) {
  return search_exact(m, hints).found;
}

std::vector<EigenvalueCount<std::complex<double>>> eigenvalues(const ApproxField& f, const ApproxMatrix& m,
                                                               std::span<const std::complex<double>> hints) {
  using C = std::complex<double>;
  auto raw = raw_eigenvalues(m);
  const double scale = std::max(1.0, frobenius_norm(m));
  constexpr double unit = std::numeric_limits<double>::epsilon();

  struct Cluster {
    C sum{0, 0};
    std::size_t size = 0;
    bool ring = false;
    C mean() const { return sum / static_cast<double>(size); }
  };
  std::vector<Cluster> clusters;
  for (const auto& z : raw) clusters.push_back({z, 1});

  auto near = [&](C a, C b, double radius) { return std::abs(a - b) <= radius; };

  // Values within 10·eps (relative) are one eigenvalue.
  for (bool merged = true; merged;) {
    merged = false;
    for (std::size_t i = 0; i < clusters.size() && !merged; ++i)
      for (std::size_t j = i + 1; j < clusters.size() && !merged; ++j) {
        C a = clusters[i].mean(), b = clusters[j].mean();
        if (near(a, b, 10.0 * f.eps * std::max({1.0, std::abs(a), std::abs(b)}))) {
          clusters[i].sum += clusters[j].sum;
          clusters[i].size += clusters[j].size;
          clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(j));
          merged = true;
        }
      }
  }

  // A Jordan block of size k perturbed by rounding splits into a regular
  // k-gon of radius about (u·‖M‖)^{1/k}·‖M‖^{1−1/k} whose centre stays accurate.
  auto radius = [&](std::size_t k) {
    const double kd = static_cast<double>(k);
    return 10.0 * std::pow(unit * scale, 1.0 / kd) * std::pow(scale, 1.0 - 1.0 / kd);
  };
  auto is_ring = [&](const std::vector<std::size_t>& members, C centre) {
    const std::size_t k = members.size();
    std::vector<double> angles;
    double lo = std::numeric_limits<double>::infinity(), hi = 0;
    for (std::size_t idx : members) {
      const C z = clusters[idx].mean() - centre;
      lo = std::min(lo, std::abs(z));
      hi = std::max(hi, std::abs(z));
      angles.push_back(std::arg(z));
    }
    if (hi > radius(k) || lo < 0.5 * hi) return false;
    std::sort(angles.begin(), angles.end());
    angles.push_back(angles.front() + 2 * std::numbers::pi);
    const double even = 2 * std::numbers::pi / static_cast<double>(k);
    for (std::size_t t = 0; t + 1 < angles.size(); ++t) {
      const double step = angles[t + 1] - angles[t];
      if (step < 0.5 * even || step > 1.5 * even) return false;
    }
    return true;
  };
  // Largest ring first; a ring's vertices are nearer each other than any
  // outside value as long as the spectrum gap exceeds three radii.
  for (bool merged = true; merged;) {
    merged = false;
    for (std::size_t i = 0; i < clusters.size() && !merged; ++i) {
      std::vector<std::size_t> order;
      for (std::size_t j = 0; j < clusters.size(); ++j)
        if (j != i && clusters[j].size == 1) order.push_back(j);
      if (clusters[i].size != 1) continue;
      const C centre = clusters[i].mean();
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(clusters[a].mean() - centre) < std::abs(clusters[b].mean() - centre);
      });
      for (std::size_t m = order.size(); m >= 1 && !merged; --m) {
        std::vector<std::size_t> members{i};
        members.insert(members.end(), order.begin(), order.begin() + static_cast<std::ptrdiff_t>(m));
        Cluster joined;
        for (std::size_t idx : members) {
          joined.sum += clusters[idx].sum;
          joined.size += clusters[idx].size;
        }
        if (!is_ring(members, joined.mean())) continue;
        joined.ring = true;
        std::sort(members.rbegin(), members.rend());
        for (std::size_t idx : members) clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(idx));
        clusters.push_back(joined);
        merged = true;
      }
    }
  }
  // Rings of several blocks of one eigenvalue, and semisimple copies of it,
  // share a centre up to about sqrt(u)·‖M‖.
  for (bool merged = true; merged;) {
    merged = false;
    for (std::size_t i = 0; i < clusters.size() && !merged; ++i)
      for (std::size_t j = i + 1; j < clusters.size() && !merged; ++j) {
        if (!clusters[i].ring && !clusters[j].ring) continue;
        if (std::abs(clusters[i].mean() - clusters[j].mean()) > std::sqrt(unit) * scale) continue;
        clusters[i].sum += clusters[j].sum;
        clusters[i].size += clusters[j].size;
        clusters[i].ring = true;
        clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(j));
        merged = true;
      }
  }

  std::vector<EigenvalueCount<C>> out;
  for (const auto& c : clusters) {
    C value = c.mean();
    for (const auto& h : hints)
      if (std::abs(h - value) <= 1e-6 * std::max(1.0, std::abs(h))) value = h;
    out.push_back({value, c.size});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return spectral_less(a.value, b.value); });
  return out;
}

std::vector<std::size_t> kernel_dims_of_powers(const ExactField& f, const ExactMatrix& n, double) {
  std::vector<std::size_t> dims;
  ExactMatrix p = n;
  for (std::size_t k = 1; k <= n.rows(); ++k) {
    dims.push_back(n.rows() - rank(f, p));
    if (dims.back() == n.rows()) break;
    p = p * n;
  }
  if (n.rows() == 0) dims.push_back(0);
  return dims;
}

std::vector<std::size_t> kernel_dims_of_powers(const ApproxField& f, const ApproxMatrix& n, double scale) {
  std::vector<std::size_t> dims;
  ApproxMatrix p = n;
  const std::size_t size = n.rows();
  for (std::size_t k = 1; k <= size; ++k) {
    double cutoff = f.eps * std::pow(scale, static_cast<double>(k));
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(to_eigen(p));
    const auto& sv = svd.singularValues();
    std::size_t r = 0;
    while (r < static_cast<std::size_t>(sv.size()) && sv(static_cast<Eigen::Index>(r)) > cutoff) ++r;
    std::size_t d = size - r;
    const std::size_t last = dims.empty() ? 0 : dims.back();
    d = std::max(d, last);  // kernels of powers are nested
    // Increments count Jordan blocks of size >= k and cannot grow.
    if (dims.size() >= 2) d = std::min(d, last + (last - dims[dims.size() - 2]));
    if (dims.size() == 1) d = std::min(d, 2 * last);
    if (d == last) d = last + 1;  // N is nilpotent, so the chain grows until it fills
    if (k == size) d = size;
    dims.push_back(d);
    if (d == size) break;
    p = p * n;
  }
  if (size == 0) dims.push_back(0);
  return dims;
}

}  // namespace ntrace::linalg
