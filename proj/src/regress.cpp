#include "ivafuse/regress.hpp"

#include "ivafuse/kernels.hpp"
#include "ivafuse/parallel.hpp"
#include "ivafuse/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ivafuse::regress {

Matrix gaussian_kernel(const Matrix& a, const Matrix& b, double sigma) {
  return kernels::gaussian_kernel(a, b, sigma);
}

namespace {

// Solves (K + lambda I) alpha = y by Cholesky with up to two steps of
// iterative refinement.
Vector solve_dual(const Matrix& k, const Vector& y, double lambda) {
  Matrix a = k;
  a.diagonal().array() += lambda;
  const Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) {
    throw Error("krr_fit: K + lambda I is not numerically positive definite (lambda=" + std::to_string(lambda) +
                ", rcond estimate " + std::to_string(Eigen::LDLT<Matrix>(a).rcond()) + ")");
  }
  Vector alpha = llt.solve(y);
  const double target = 1e-12 * std::max(y.norm(), std::numeric_limits<double>::min());
  for (int step = 0; step < 2; ++step) {
    const Vector r = y - a * alpha;
    if (r.norm() <= target) break;
    alpha += llt.solve(r);
  }
  if (!alpha.allFinite()) throw Error("krr_fit: solver produced non-finite weights");
  return alpha;
}

}  // namespace

KrrModel krr_fit(const Matrix& x, const Vector& y, double sigma, double lambda) {
  if (x.cols() < 1) throw Error("krr_fit: need at least one training point");
  if (x.cols() != y.size()) throw Error("krr_fit: label count does not match training points");
  if (!(lambda >= 0.0)) throw Error("krr_fit: lambda must be non-negative");
  KrrModel m;
  m.support = x;
  m.sigma = sigma;
  m.lambda = lambda;
  m.mean_label = y.mean();
  const Vector centered = y.array() - m.mean_label;
  m.alpha = solve_dual(kernels::gaussian_kernel(x, x, sigma), centered, lambda);
  return m;
}

Vector krr_predict(const KrrModel& model, const Matrix& x) {
  const Matrix k = kernels::gaussian_kernel(x, model.support, model.sigma);
  return (k * model.alpha).array() + model.mean_label;
}

double mae(const Vector& pred, const Vector& truth) {
  if (pred.size() != truth.size()) throw Error("mae: length mismatch");
  if (pred.size() < 1) throw Error("mae: empty vectors");
  return (pred - truth).cwiseAbs().mean();
}

PowerLaw fit_learning_curve(std::span<const std::pair<double, double>> points) {
  if (points.size() < 2) throw Error("fit_learning_curve: need at least two points");
  double mx = 0.0, my = 0.0;
  for (const auto& [n, e] : points) {
    if (!(n > 0.0) || !(e > 0.0)) throw Error("fit_learning_curve: N and MAE must be positive");
    mx += std::log(n);
    my += std::log(e);
  }
  const double count = static_cast<double>(points.size());
  mx /= count;
  my /= count;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [n, e] : points) {
    const double dx = std::log(n) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(e) - my);
  }
  if (!(sxx > 0.0)) throw Error("fit_learning_curve: all N are equal");
  PowerLaw out;
  out.alpha = sxy / sxx;
  out.c = std::exp(my - out.alpha * mx);
  return out;
}

CvConfig CvConfig::defaults() {
  CvConfig cfg;
  for (int i = -4; i <= 4; ++i) cfg.sigma_scales.push_back(std::ldexp(1.0, i));
  for (int i = 1; i <= 9; ++i) cfg.lambda_grid.push_back(std::pow(10.0, -i));
  return cfg;
}

void CvConfig::validate() const {
  if (sigma_scales.empty() || lambda_grid.empty()) throw Error("CvConfig: empty hyperparameter grid");
  for (double s : sigma_scales) {
    if (!(s > 0.0)) throw Error("CvConfig: sigma scales must be positive");
  }
  for (double l : lambda_grid) {
    if (!(l >= 0.0)) throw Error("CvConfig: lambda values must be non-negative");
  }
  if (std::abs(train_fraction + validation_fraction + test_fraction - 1.0) > 1e-9) {
    throw Error("CvConfig: split fractions must sum to 1");
  }
  if (!(test_fraction > 0.0) || !(validation_fraction > 0.0) || !(train_fraction > 0.0)) {
    throw Error("CvConfig: split fractions must be positive");
  }
  if (repeats < 1 || outer_folds < 1) throw Error("CvConfig: repeats and folds must be positive");
}

namespace {

struct BlockLayout {
  int blocks = 10;
  int validation_blocks = 1;
};

BlockLayout layout(const CvConfig& cfg) {
  BlockLayout b;
  b.blocks = static_cast<int>(std::lround(1.0 / cfg.test_fraction));
  b.validation_blocks = static_cast<int>(std::lround(cfg.validation_fraction * b.blocks));
  if (b.blocks < 2 || b.validation_blocks < 1 || b.validation_blocks >= b.blocks - 1) {
    throw Error("CvConfig: split fractions do not form whole blocks");
  }
  if (cfg.outer_folds > b.blocks) throw Error("CvConfig: more outer folds than test blocks");
  return b;
}

}  // namespace

Split make_split(Index n, const CvConfig& cfg, int repeat, int fold) {
  const BlockLayout b = layout(cfg);
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(repeat)));
  std::shuffle(perm.begin(), perm.end(), rng);

  // Block `fold` is the test set, the next validation_blocks blocks validate.
  Split s;
  for (int blk = 0; blk < b.blocks; ++blk) {
    const Index lo = n * blk / b.blocks;
    const Index hi = n * (blk + 1) / b.blocks;
    const int offset = (blk - fold + b.blocks) % b.blocks;
    auto& dst = offset == 0 ? s.test : offset <= b.validation_blocks ? s.validation : s.train;
    dst.insert(dst.end(), perm.begin() + lo, perm.begin() + hi);
  }
  if (s.test.empty() || s.validation.empty() || s.train.size() < 2) {
    throw Error("nested_cv: degenerate split for N=" + std::to_string(n));
  }
  return s;
}

namespace {

double median_distance(const Matrix& x, Index cap) {
  const Index m = std::min<Index>(x.cols(), std::max<Index>(cap, 2));
  const double d = kernels::median_pairwise_distance_serial(x.leftCols(m));
  return d > 0.0 ? d : 1.0;
}

Vector gather_labels(const Vector& y, const std::vector<Index>& idx) {
  Vector out(static_cast<Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out(static_cast<Index>(i)) = y(idx[i]);
  return out;
}

CvCell run_cell(std::span<const FeatureTable> tables, const Vector& y, const CvConfig& cfg,
                const fusion::Spec& spec, int repeat, int fold) {
  const Index n = tables[0].size();
  const Split split = make_split(n, cfg, repeat, fold);

  std::vector<FeatureTable> poisoned;
  if (cfg.poison_test) {
    poisoned.assign(tables.begin(), tables.end());
    for (auto& t : poisoned) {
      for (Index j : split.test) t.data.col(j).setConstant(std::numeric_limits<double>::quiet_NaN());
    }
    tables = poisoned;
  }

  CvCell cell;
  cell.repeat = repeat;
  cell.fold = fold;
  cell.n_train = static_cast<Index>(split.train.size());
  cell.n_validation = static_cast<Index>(split.validation.size());
  cell.n_test = static_cast<Index>(split.test.size());

  // Inner selection on train / validation.
  const auto inner = fusion::fit(tables, split.train, spec);
  const Matrix f_train = fusion::apply(inner, tables, split.train);
  const Matrix f_val = fusion::apply(inner, tables, split.validation);
  const Vector y_train = gather_labels(y, split.train);
  const Vector y_val = gather_labels(y, split.validation);
  const double mean_train = y_train.mean();
  const Vector yc = y_train.array() - mean_train;
  const double median = median_distance(f_train, cfg.median_cap);

  double best_mae = std::numeric_limits<double>::infinity();
  double best_scale = 0.0, best_lambda = 0.0;
  for (double scale : cfg.sigma_scales) {
    const double sigma = scale * median;
    const Matrix k_train = kernels::gaussian_kernel(f_train, f_train, sigma);
    const Matrix k_val = kernels::gaussian_kernel(f_val, f_train, sigma);
    for (double lambda : cfg.lambda_grid) {
      Vector alpha;
      try {
        alpha = solve_dual(k_train, yc, lambda);
      } catch (const Error&) {
        continue;  // numerically singular grid point; skip it
      }
      const Vector pred = (k_val * alpha).array() + mean_train;
      const double v = mae(pred, y_val);
      if (!std::isfinite(v)) continue;
      const bool better = v < best_mae ||
                          (v == best_mae && (lambda > best_lambda || (lambda == best_lambda && scale > best_scale)));
      if (better) {
        best_mae = v;
        best_scale = scale;
        best_lambda = lambda;
      }
    }
  }
  if (!std::isfinite(best_mae)) throw Error("nested_cv: no usable hyperparameter pair in the grid");

  // Refit on train + validation with the winner; score the held-out fold.
  std::vector<Index> refit_cols = split.train;
  refit_cols.insert(refit_cols.end(), split.validation.begin(), split.validation.end());
  const auto outer = fusion::fit(tables, refit_cols, spec);
  const Matrix f_refit = fusion::apply(outer, tables, refit_cols);
  const Matrix f_test = fusion::apply(outer, tables, split.test);
  cell.feature_dim = f_refit.rows();
  cell.validation_mae = best_mae;
  cell.sigma_scale = best_scale;
  cell.sigma = best_scale * median_distance(f_refit, cfg.median_cap);
  cell.lambda = best_lambda;
  const KrrModel model = krr_fit(f_refit, gather_labels(y, refit_cols), cell.sigma, cell.lambda);
  const Vector pred = krr_predict(model, f_test);
  const Vector truth = gather_labels(y, split.test);
  cell.test_mae = mae(pred, truth);
  cell.abs_error_sum = (pred - truth).cwiseAbs().sum();
  return cell;
}

}  // namespace

void finalize(CvReport& report) {
  std::vector<double> maes;
  double abs_sum = 0.0;
  double count = 0.0;
  for (const auto& c : report.cells) {
    maes.push_back(c.test_mae);
    abs_sum += c.abs_error_sum;
    count += static_cast<double>(c.n_test);
  }
  const bool finite = std::all_of(maes.begin(), maes.end(), [](double v) { return std::isfinite(v); });
  if (maes.empty() || !finite) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    report.summary = stats::Summary{nan, nan, nan, nan, nan, nan, nan, maes.size()};
    report.pooled_mae = nan;
    return;
  }
  report.summary = stats::summarize(maes);
  report.pooled_mae = abs_sum / count;
}

CvReport nested_cv(std::span<const FeatureTable> tables, const LabelVector& labels, const CvConfig& cfg,
                   const fusion::Spec& spec) {
  cfg.validate();
  if (tables.empty()) throw Error("nested_cv: no feature tables");
  for (const auto& t : tables) {
    if (t.molecule_ids != tables[0].molecule_ids) throw Error("nested_cv: feature tables are not aligned");
  }
  const LabelVector y = dataio::align_labels(labels, tables[0].molecule_ids);

  CvReport report;
  report.property = labels.property_name;
  report.units = labels.units;
  report.feature_set = fusion::mode_name(spec);
  report.n_used = tables[0].size();
  report.cells.resize(static_cast<std::size_t>(cfg.repeats * cfg.outer_folds));
  parallel_for(static_cast<long>(report.cells.size()), [&](long i) {
    const int r = static_cast<int>(i / cfg.outer_folds);
    const int f = static_cast<int>(i % cfg.outer_folds);
    report.cells[static_cast<std::size_t>(i)] = run_cell(tables, y.values, cfg, spec, r, f);
  });
  report.feature_dim = report.cells.front().feature_dim;
  finalize(report);
  return report;
}

}  // namespace ivafuse::regress
