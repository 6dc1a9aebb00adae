#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "ntrace/spectral/spectral.hpp"

namespace ntrace::testing {

using linalg::ApproxMatrix;
using linalg::ExactMatrix;
using linalg::GaussRational;
using spectral::AdmissibleModel;

/// Block upper-triangular module with certified-irreducible diagonal blocks
/// (characters, or two-dimensional blocks for ≥ 2 generators), random
/// integer off-diagonal blocks, conjugated by a random unimodular matrix.
/// Δ is the first generator, so every submodule is Δ-stable.
struct RandomModel {
  AdmissibleModel<linalg::ExactField> model;
  std::vector<std::size_t> block_types;          // type index per diagonal block, bottom to top
  std::vector<AdmissibleModel<linalg::ExactField>> types;
};

RandomModel random_module(std::mt19937_64& rng, std::size_t max_dim, std::size_t n_gens);

/// Δ = S·(⊕ J_k(σ))·S⁻¹ with distinct Gaussian-integer σ and at least one
/// block of size ≥ 2 when `nilpotent` is set.
struct RandomDelta {
  ExactMatrix delta;
  std::vector<GaussRational> sigmas;  // distinct spectral values
};

RandomDelta random_delta(std::mt19937_64& rng, std::size_t max_dim, bool nilpotent);

ExactMatrix random_unimodular(std::mt19937_64& rng, std::size_t n);

/// Random element of the algebra generated by `gens` (words of length ≤ 2).
ExactMatrix random_algebra_element(std::mt19937_64& rng, const std::vector<ExactMatrix>& gens);

AdmissibleModel<linalg::ApproxField> to_approx(const AdmissibleModel<linalg::ExactField>& m);

}  // namespace ntrace::testing
