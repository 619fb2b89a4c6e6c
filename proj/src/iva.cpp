#include "ivafuse/iva.hpp"

#include "ivafuse/kernels.hpp"
#include "ivafuse/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>

#include <Eigen/QR>

namespace ivafuse {

void IvaOptions::validate() const {
  if (!(step_size > 0.0)) throw Error("IvaOptions: step_size must be positive");
  if (!(tol > 0.0)) throw Error("IvaOptions: tol must be positive");
  if (max_iters < 1) throw Error("IvaOptions: max_iters must be at least 1");
  if (restarts < 1) throw Error("IvaOptions: restarts must be at least 1");
}

namespace iva {

namespace {

constexpr double kSingularRatio = 1e-12;

// log|det W|, or nullopt when W is numerically singular (Hadamard ratio
// |det W| / prod ||row|| below kSingularRatio).
std::optional<double> log_abs_det(const Matrix& w) {
  const Eigen::PartialPivLU<Matrix> lu(w);
  double log_det = 0.0;
  for (Index i = 0; i < w.rows(); ++i) {
    const double u = std::abs(lu.matrixLU()(i, i));
    if (!(u > 0.0)) return std::nullopt;
    log_det += std::log(u);
  }
  double log_rows = 0.0;
  for (Index i = 0; i < w.rows(); ++i) log_rows += std::log(w.row(i).norm());
  if (!std::isfinite(log_det) || log_det - log_rows < std::log(kSingularRatio)) return std::nullopt;
  return log_det;
}

std::optional<double> total_log_det(std::span<const Matrix> w) {
  double s = 0.0;
  for (const auto& wk : w) {
    const auto ld = log_abs_det(wk);
    if (!ld) return std::nullopt;
    s += *ld;
  }
  return s;
}

void check_data(const MultisetTensor& data) {
  if (data.K() < 1) throw Error("iva_l: empty tensor");
  if (data.N() < data.P()) throw Error("iva_l: need N >= P samples");
  for (const auto& s : data.slices) {
    if (!s.allFinite()) throw Error("iva_l: non-finite data");
  }
}

std::vector<Matrix> initial_demixing(const MultisetTensor& data, IvaInit init, std::uint64_t seed) {
  const Index p = data.P();
  std::vector<Matrix> w(data.slices.size(), Matrix::Identity(p, p));
  if (init == IvaInit::SeededPerturbation) {
    Rng rng(seed);
    std::uniform_real_distribution<double> u(-0.01, 0.01);
    for (auto& wk : w) {
      for (Index j = 0; j < p; ++j) {
        for (Index i = 0; i < p; ++i) wk(i, j) += u(rng);
      }
    }
  }
  return w;
}

// Haar-distributed orthogonal start per slice (QR of a Gaussian matrix with
// the sign of R's diagonal folded into Q).
std::vector<Matrix> random_orthogonal(const MultisetTensor& data, std::uint64_t seed) {
  const Index p = data.P();
  Rng rng(seed);
  std::normal_distribution<double> normal;
  std::vector<Matrix> w;
  for (Index k = 0; k < data.K(); ++k) {
    Matrix g(p, p);
    for (Index j = 0; j < p; ++j) {
      for (Index i = 0; i < p; ++i) g(i, j) = normal(rng);
    }
    const Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index j = 0; j < p; ++j) {
      if (r(j, j) < 0.0) q.col(j) = -q.col(j);
    }
    w.push_back(std::move(q));
  }
  return w;
}

double relative_change(const Matrix& step, const Matrix& w) { return step.norm() / w.norm(); }

}  // namespace

std::vector<Matrix> demix(std::span<const Matrix> w, const MultisetTensor& data) {
  if (w.size() != data.slices.size()) throw Error("demix: K mismatch");
  std::vector<Matrix> y;
  y.reserve(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (w[k].cols() != data.slices[k].rows()) throw Error("demix: W does not match slice dimension");
    y.push_back(w[k] * data.slices[k]);
  }
  return y;
}

double eval_cost(std::span<const Matrix> w, const MultisetTensor& data) {
  const auto log_det = total_log_det(w);
  if (!log_det) throw Error("eval_cost: singular demixing matrix");
  const auto y = demix(w, data);
  return kernels::scv_radius_sum(y) / static_cast<double>(data.N()) - *log_det;
}

DemixingSet iva_l_from(const MultisetTensor& data, std::vector<Matrix> w, const IvaOptions& opts) {
  opts.validate();
  check_data(data);
  const Index p = data.P();
  const auto n = static_cast<double>(data.N());
  const Matrix eye = Matrix::Identity(p, p);

  const auto log_det0 = total_log_det(w);
  if (!log_det0) throw Error("iva_l: singular initial demixing matrix");
  auto stats = kernels::scv_statistics(demix(w, data));
  double cost = stats.radius_sum / n - *log_det0;
  if (!std::isfinite(cost)) throw Error("iva_l: non-finite initial cost");

  DemixingSet out;
  out.seed = opts.seed;
  out.cost_trace.push_back(cost);
  double eta = opts.step_size;
  const double min_eta = opts.step_size * std::ldexp(1.0, -50);

  std::vector<Matrix> grad(w.size());
  std::vector<Matrix> candidate(w.size());
  int it = 0;
  while (it < opts.max_iters) {
    ++it;
    for (std::size_t k = 0; k < w.size(); ++k) grad[k] = (eye - stats.score_cov[k]) * w[k];

    for (std::size_t k = 0; k < w.size(); ++k) candidate[k] = w[k] + eta * grad[k];
    const auto log_det = total_log_det(candidate);
    bool accept = false;
    kernels::ScvStatistics cand_stats;
    double cand_cost = std::numeric_limits<double>::infinity();
    if (log_det) {
      cand_stats = kernels::scv_statistics(demix(candidate, data));
      cand_cost = cand_stats.radius_sum / n - *log_det;
      if (std::isnan(cand_cost) || std::isinf(cand_cost)) {
        throw Error("iva_l: non-finite cost at iteration " + std::to_string(it) + " (divergence)");
      }
      accept = cand_cost <= cost;
    }

    if (!accept) {
      eta *= 0.5;
      if (eta < min_eta) break;  // stalled: no descent at any representable step
      continue;
    }

    double rel = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) rel = std::max(rel, relative_change(eta * grad[k], w[k]));
    std::swap(w, candidate);
    stats = std::move(cand_stats);
    cost = cand_cost;
    out.cost_trace.push_back(cost);
    eta = std::min(eta * 1.05, opts.step_size);
    if (rel < opts.tol) {
      out.converged = true;
      break;
    }
  }

  out.W = std::move(w);
  out.iterations = it;
  out.final_cost = eval_cost(out.W, data);
  return out;
}

DemixingSet iva_l(const MultisetTensor& data, const IvaOptions& opts) {
  opts.validate();
  check_data(data);
  std::optional<DemixingSet> best;
  for (int r = 0; r < opts.restarts; ++r) {
    // Restart 0 honours opts.init; later restarts start from random rotations,
    // which is what escapes cross-dataset permutation misalignment.
    const std::uint64_t seed = r == 0 ? opts.seed : derive_seed(opts.seed, static_cast<std::uint64_t>(r));
    DemixingSet run =
        iva_l_from(data, r == 0 ? initial_demixing(data, opts.init, seed) : random_orthogonal(data, seed), opts);
    run.seed = seed;
    if (!best || run.final_cost < best->final_cost) best = std::move(run);
  }
  return std::move(*best);
}

DemixingSet ica_mode(const MultisetTensor& data, const IvaOptions& opts) {
  check_data(data);
  std::vector<DemixingSet> runs;
  for (Index k = 0; k < data.K(); ++k) {
    const MultisetTensor slice{{data.slices[k]}, {data.names.empty() ? "" : data.names[k]}};
    runs.push_back(iva_l(slice, opts));
  }
  if (runs.size() == 1) return std::move(runs.front());

  DemixingSet out;
  out.seed = opts.seed;
  out.converged = true;
  std::size_t longest = 0;
  for (const auto& r : runs) {
    out.W.push_back(r.W.front());
    out.iterations = std::max(out.iterations, r.iterations);
    out.converged = out.converged && r.converged;
    out.final_cost += r.final_cost;
    longest = std::max(longest, r.cost_trace.size());
  }
  for (std::size_t i = 0; i < longest; ++i) {
    double s = 0.0;
    for (const auto& r : runs) s += r.cost_trace[std::min(i, r.cost_trace.size() - 1)];
    out.cost_trace.push_back(s);
  }
  return out;
}

double amari_index(const Matrix& g) {
  const Index p = g.rows();
  if (g.cols() != p) throw Error("amari_index: matrix must be square");
  if (p == 1) return 0.0;
  const Matrix a = g.cwiseAbs();
  double rows = 0.0;
  for (Index i = 0; i < p; ++i) rows += a.row(i).sum() / a.row(i).maxCoeff() - 1.0;
  double cols = 0.0;
  for (Index j = 0; j < p; ++j) cols += a.col(j).sum() / a.col(j).maxCoeff() - 1.0;
  return (rows + cols) / (2.0 * static_cast<double>(p) * static_cast<double>(p - 1));
}

namespace {

// |G| with every row divided by its largest entry: removes the per-row scale
// that blind separation cannot identify.
Matrix row_normalized(const Matrix& g) {
  Matrix a = g.cwiseAbs();
  for (Index i = 0; i < a.rows(); ++i) {
    const double m = a.row(i).maxCoeff();
    if (m > 0.0) a.row(i) /= m;
  }
  return a;
}

}  // namespace

double joint_isi(std::span<const Matrix> w, std::span<const Matrix> a) {
  if (w.size() != a.size() || w.empty()) throw Error("joint_isi: need one mixing matrix per demixing matrix");
  const Index p = w[0].rows();
  Matrix sum = Matrix::Zero(p, p);
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (w[k].rows() != p || w[k].cols() != a[k].rows() || a[k].cols() != p) {
      throw Error("joint_isi: incompatible shapes");
    }
    sum += row_normalized(w[k] * a[k]);
  }
  return amari_index(sum);
}

double mean_amari(std::span<const Matrix> w, std::span<const Matrix> a) {
  if (w.size() != a.size() || w.empty()) throw Error("mean_amari: need one mixing matrix per demixing matrix");
  double s = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) s += amari_index(row_normalized(w[k] * a[k]));
  return s / static_cast<double>(w.size());
}

}  // namespace iva
}  // namespace ivafuse
