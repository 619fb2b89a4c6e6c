#include "ivafuse/bench.hpp"

#include "ivafuse/rng.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace ivafuse::bench {

std::vector<Matrix> sample_scv_sources(Index K, Index P, Index N, double rho, std::uint64_t seed,
                                       bool independent_slices) {
  if (!(rho >= 0.0 && rho < 1.0)) throw Error("sample_scv_sources: rho must lie in [0, 1)");
  if (K < 1 || P < 1 || N < 1) throw Error("sample_scv_sources: K, P, N must be positive");
  if (independent_slices) {
    if (rho != 0.0) throw Error("sample_scv_sources: independent slices require rho = 0");
    std::vector<Matrix> s;
    for (Index k = 0; k < K; ++k) {
      s.push_back(sample_scv_sources(1, P, N, 0.0, derive_seed(seed, static_cast<std::uint64_t>(k)))[0]);
    }
    return s;
  }

  const Matrix sigma = (1.0 - rho) * Matrix::Identity(K, K) + rho * Matrix::Ones(K, K);
  const Matrix chol = Eigen::LLT<Matrix>(sigma).matrixL();

  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::exponential_distribution<double> exponential(1.0);
  std::vector<Matrix> s(K, Matrix(P, N));
  Vector z(K);
  for (Index p = 0; p < P; ++p) {
    for (Index n = 0; n < N; ++n) {
      const double scale = std::sqrt(exponential(rng));
      for (Index k = 0; k < K; ++k) z(k) = normal(rng);
      const Vector v = scale * (chol * z);
      for (Index k = 0; k < K; ++k) s[k](p, n) = v(k);
    }
  }
  return s;
}

double condition_number(const Matrix& a) {
  const Eigen::JacobiSVD<Matrix> svd(a);
  const auto& sv = svd.singularValues();
  return sv(0) / sv(sv.size() - 1);
}

SyntheticProblem make_problem(Index K, Index P, Index N, double rho, double cond_bound, std::uint64_t seed,
                              bool independent_slices) {
  if (!(cond_bound > 1.0)) throw Error("make_problem: cond_bound must exceed 1");
  SyntheticProblem prob;
  prob.K = K;
  prob.P = P;
  prob.N = N;
  prob.rho = rho;
  prob.seed = seed;
  prob.S = sample_scv_sources(K, P, N, rho, derive_seed(seed, 0), independent_slices);

  Rng rng(derive_seed(seed, 1));
  std::normal_distribution<double> normal(0.0, 1.0);
  constexpr int kMaxAttempts = 100;
  for (Index k = 0; k < K; ++k) {
    Matrix a(P, P);
    bool ok = false;
    for (int attempt = 0; attempt < kMaxAttempts && !ok; ++attempt) {
      for (Index j = 0; j < P; ++j) {
        for (Index i = 0; i < P; ++i) a(i, j) = normal(rng);
      }
      const double c = condition_number(a);
      ok = std::isfinite(c) && c <= cond_bound;
    }
    if (!ok) {
      throw Error("make_problem: no mixing matrix with condition number <= " + std::to_string(cond_bound) +
                  " in " + std::to_string(kMaxAttempts) + " draws (bound infeasible)");
    }
    prob.A.push_back(a);
    prob.X.push_back(a * prob.S[k]);
  }
  return prob;
}

std::string to_string(Mode mode) { return mode == Mode::Iva ? "iva" : "ica"; }

Mode parse_mode(const std::string& text) {
  if (text == "iva") return Mode::Iva;
  if (text == "ica") return Mode::Ica;
  throw Error("unknown separation mode \"" + text + "\" (expected iva or ica)");
}

Recovery recovery_experiment(const SyntheticProblem& problem, const IvaOptions& opts, Mode mode) {
  std::vector<Matrix> whitened;
  Recovery out;
  for (Index k = 0; k < problem.K; ++k) {
    const Reducer r = multiset::fit_reducer(problem.X[k], problem.P, true);
    whitened.push_back(multiset::apply_reducer(r, problem.X[k]));
    out.effective_mixing.push_back(r.F * problem.A[k]);
  }
  const MultisetTensor tensor = multiset::make_tensor(std::move(whitened), {});
  out.demixing = mode == Mode::Iva ? iva::iva_l(tensor, opts) : iva::ica_mode(tensor, opts);
  out.jisi = iva::joint_isi(out.demixing.W, out.effective_mixing);
  out.mean_amari = iva::mean_amari(out.demixing.W, out.effective_mixing);
  return out;
}

}  // namespace ivafuse::bench
