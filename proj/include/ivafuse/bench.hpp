#pragma once

#include "ivafuse/iva.hpp"
#include "ivafuse/multiset.hpp"
#include "ivafuse/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ivafuse::bench {

/// Noiseless multiset mixture X_k = A_k S_k with known ground truth.
struct SyntheticProblem {
  Index K = 0, P = 0, N = 0;
  double rho = 0.0;
  std::vector<Matrix> A;  // K mixing matrices, P x P
  std::vector<Matrix> S;  // K source slices, P x N
  std::vector<Matrix> X;  // K observation slices, P x N
  std::uint64_t seed = 0;
};

/// Draws P independent K-variate multivariate Laplacian SCVs per sample:
/// s = sqrt(w) L z with w ~ Exp(1), z ~ N(0, I_K) and L L^T the
/// equicorrelation matrix (1 - rho) I + rho 11^T. Returns K slices of P x N.
///
/// The shared scale w keeps the K entries of an SCV dependent even at
/// rho = 0. `independent_slices` instead draws every dataset from its own
/// univariate Laplacian stream (rho must then be 0), which is the
/// dependence-free control.
std::vector<Matrix> sample_scv_sources(Index K, Index P, Index N, double rho, std::uint64_t seed,
                                       bool independent_slices = false);

/// 2-norm condition number via SVD.
double condition_number(const Matrix& a);

/// Mixing matrices have i.i.d. standard normal entries, redrawn until their
/// condition number is <= cond_bound (at most 100 draws each).
SyntheticProblem make_problem(Index K, Index P, Index N, double rho, double cond_bound, std::uint64_t seed,
                              bool independent_slices = false);

enum class Mode { Iva, Ica };

std::string to_string(Mode mode);
Mode parse_mode(const std::string& text);

struct Recovery {
  double jisi = 0.0;
  double mean_amari = 0.0;  // per-dataset separation quality
  DemixingSet demixing;
  std::vector<Matrix> effective_mixing;  // F_k A_k after whitening
};

/// Whitens each slice (PCA of order P), separates with the chosen mode and
/// scores against the whitened effective mixing matrices.
Recovery recovery_experiment(const SyntheticProblem& problem, const IvaOptions& opts, Mode mode);

}  // namespace ivafuse::bench
