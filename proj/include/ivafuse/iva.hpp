#pragma once

#include "ivafuse/multiset.hpp"
#include "ivafuse/types.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace ivafuse {

enum class IvaInit { Identity, SeededPerturbation };

struct IvaOptions {
  double step_size = 0.1;  // initial (and maximum) natural-gradient step
  int max_iters = 2048;
  double tol = 1e-6;  // on max_k ||dW_k||_F / ||W_k||_F of an accepted step
  std::uint64_t seed = 0;
  IvaInit init = IvaInit::Identity;
  int restarts = 4;  // best of R runs by final cost

  void validate() const;
};

struct DemixingSet {
  std::vector<Matrix> W;  // K matrices, P x P
  int iterations = 0;
  double final_cost = 0.0;
  std::vector<double> cost_trace;  // initial cost, then one entry per accepted step
  bool converged = false;
  std::uint64_t seed = 0;

  Index K() const { return static_cast<Index>(W.size()); }
};

namespace iva {

/// IVA with a multivariate Laplacian source-component-vector prior, fitted
/// by natural-gradient descent with step halving on cost increase.
DemixingSet iva_l(const MultisetTensor& data, const IvaOptions& opts);

/// One IVA-L run from a given starting point; no restarts.
DemixingSet iva_l_from(const MultisetTensor& data, std::vector<Matrix> w0, const IvaOptions& opts);

/// (1/N) sum_n sum_p ||y_p(n)|| - sum_k log|det W_k|; constant entropy terms
/// are dropped.
double eval_cost(std::span<const Matrix> w, const MultisetTensor& data);
inline double eval_cost(const DemixingSet& w, const MultisetTensor& data) { return eval_cost(w.W, data); }

/// Independent per-dataset runs (K = 1 each). No cross-dataset alignment.
/// cost_trace holds the summed per-slice costs, each slice held at its last
/// value once it terminates.
DemixingSet ica_mode(const MultisetTensor& data, const IvaOptions& opts);

/// Y_k = W_k X_k.
std::vector<Matrix> demix(std::span<const Matrix> w, const MultisetTensor& data);

/// Amari index of a single square global matrix, in [0, 1].
double amari_index(const Matrix& g);

/// Amari index of sum_k |W_k A_k|. Returns 0 for P = 1.
double joint_isi(std::span<const Matrix> w, std::span<const Matrix> a);

/// Mean over k of the per-dataset Amari index of W_k A_k.
double mean_amari(std::span<const Matrix> w, std::span<const Matrix> a);

}  // namespace iva
}  // namespace ivafuse
