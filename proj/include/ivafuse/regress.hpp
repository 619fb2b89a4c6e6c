#pragma once

#include "ivafuse/dataio.hpp"
#include "ivafuse/fusion.hpp"
#include "ivafuse/stats.hpp"
#include "ivafuse/types.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ivafuse::regress {

/// exp(-||a_i - b_j||^2 / (2 sigma^2)); throws for sigma <= 0.
Matrix gaussian_kernel(const Matrix& a, const Matrix& b, double sigma);

/// Kernel ridge regression with centred labels:
/// f(x) = mean + sum_m alpha_m k(x, x_m), (K + lambda I) alpha = y - mean.
struct KrrModel {
  Matrix support;  // d x M
  Vector alpha;    // M
  double sigma = 1.0;
  double lambda = 0.0;
  double mean_label = 0.0;
};

KrrModel krr_fit(const Matrix& x, const Vector& y, double sigma, double lambda);
Vector krr_predict(const KrrModel& model, const Matrix& x);

double mae(const Vector& pred, const Vector& truth);

struct PowerLaw {
  double c = 0.0;
  double alpha = 0.0;
};

/// Least-squares fit of log(MAE) = log C + alpha log N.
PowerLaw fit_learning_curve(std::span<const std::pair<double, double>> points);

struct CvConfig {
  int outer_folds = 5;
  int repeats = 30;
  double train_fraction = 0.8;
  double validation_fraction = 0.1;
  double test_fraction = 0.1;
  std::vector<double> sigma_scales;  // multiples of the median pairwise training distance
  std::vector<double> lambda_grid;
  std::uint64_t seed = 0;
  // Subsample cap for the median pairwise distance (first columns of the
  // shuffled training split).
  Index median_cap = 2000;
  // Dry run: overwrite every test fold with NaN before any fitting. Any
  // leakage of test data into fusion or model selection then surfaces as a
  // non-finite value or an exception.
  bool poison_test = false;

  static CvConfig defaults();
  void validate() const;
};

struct CvCell {
  int repeat = 0;
  int fold = 0;
  double test_mae = 0.0;
  double validation_mae = 0.0;
  double sigma_scale = 0.0;  // chosen multiple of the median distance
  double sigma = 0.0;        // absolute length scale used in the refit
  double lambda = 0.0;
  Index feature_dim = 0;
  Index n_train = 0, n_validation = 0, n_test = 0;
  double abs_error_sum = 0.0;  // sum of |error| over the test fold
};

struct CvReport {
  std::string property;
  std::string units;
  std::string feature_set;
  Index n_used = 0;
  Index feature_dim = 0;
  std::vector<CvCell> cells;
  stats::Summary summary;    // over per-cell test MAE
  double pooled_mae = 0.0;   // all test predictions pooled (weights cells by size)
};

/// Per-cell training/validation/test column indices for (repeat, fold).
struct Split {
  std::vector<Index> train, validation, test;
};
Split make_split(Index n, const CvConfig& cfg, int repeat, int fold);

/// Repeated nested cross-validation. All fusion steps are fitted on training
/// columns only, inside each cell; hyperparameters are chosen on validation
/// MAE (ties: larger lambda, then larger sigma) and the winner is refitted on
/// training + validation before scoring the held-out fold.
CvReport nested_cv(std::span<const FeatureTable> tables, const LabelVector& labels, const CvConfig& cfg,
                   const fusion::Spec& spec);

/// Recomputes summary and pooled MAE from the cells.
void finalize(CvReport& report);

}  // namespace ivafuse::regress
