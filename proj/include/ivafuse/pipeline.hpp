#pragma once

#include "ivafuse/bench.hpp"
#include "ivafuse/config.hpp"
#include "ivafuse/dataio.hpp"
#include "ivafuse/fusion.hpp"
#include "ivafuse/regress.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

// End-to-end commands: featurize -> fuse -> regress -> report. Every command
// writes its outputs plus a manifest.json (config snapshot, hash, seed,
// version) into cfg.out. Outputs depend only on the configuration, never on
// the number of worker threads or on wall-clock time, except the
// bench_timing.csv side file.
namespace ivafuse::pipeline {

using Json = nlohmann::json;

/// Loads cfg.tables, aligned to the first table's molecule order, and
/// optionally subsampled to cfg.subsample molecules (seeded).
std::vector<FeatureTable> load_tables(const RunConfig& cfg);
LabelVector load_run_labels(const RunConfig& cfg);

/// SOB and WE from cfg.smiles, CME from cfg.xyz (whichever is set).
std::vector<FeatureTable> featurize(const RunConfig& cfg);

/// Fits the configured fusion on all molecules and writes fused.csv,
/// reducers.json and demixing.json (ICA/IVA only).
fusion::Model fuse(const RunConfig& cfg);

/// Nested CV of the configured fusion mode; writes cv_report.json,
/// cv_cells.csv, and whole-data reducers/demixing for interpretation.
regress::CvReport run_pipeline(const RunConfig& cfg);
regress::CvReport run_pipeline(const RunConfig& cfg, const std::vector<FeatureTable>& tables,
                               const LabelVector& labels, const std::filesystem::path& out);

struct CurvePoint {
  Index n = 0;
  double mae = 0.0;
  double pooled_mae = 0.0;
};
struct LearningCurve {
  std::string feature_set;
  std::vector<CurvePoint> points;
  regress::PowerLaw fit;
};

LearningCurve learning_curve_run(const RunConfig& cfg, const std::vector<Index>& sizes);
LearningCurve learning_curve_run(const RunConfig& cfg, const std::vector<FeatureTable>& tables,
                                 const LabelVector& labels, const std::vector<Index>& sizes,
                                 const std::filesystem::path& out);

struct SweepRow {
  std::vector<std::string> members;
  stats::Summary regular;
  stats::Summary iva;
  Index regular_dim = 0;
  Index iva_dim = 0;
};
struct SweepReport {
  int k = 0;
  std::vector<SweepRow> rows;
  stats::Summary regular_summary;  // over per-combination mean MAE
  stats::Summary iva_summary;
};

/// All k-subsets of [0, n) in lexicographic order.
std::vector<std::vector<std::size_t>> combinations(std::size_t n, std::size_t k);

SweepReport combination_sweep(const RunConfig& cfg, const std::vector<FeatureTable>& tables,
                              const LabelVector& labels, int k, const std::filesystem::path& out);

struct MixingEntry {
  std::string feature;
  double weight = 0.0;
};
struct MixingReport {
  // [dataset][source] -> entries sorted by |weight| descending
  std::vector<std::string> datasets;
  std::vector<std::vector<std::vector<MixingEntry>>> weights;
  std::vector<Matrix> mixing;  // d_k x P back-reconstructed matrices
};

/// Reads reducers.json + demixing.json from `dir`, back-reconstructs each
/// dataset's mixing matrix and writes mixing_<dataset>.csv.
MixingReport mixing_report(const std::filesystem::path& dir, const std::filesystem::path& out);

struct BenchRow {
  std::uint64_t seed = 0;
  std::string mode;
  double jisi = 0.0;
  double mean_amari = 0.0;
  int iterations = 0;
  bool converged = false;
  double final_cost = 0.0;
  bool monotone = true;  // cost trace non-increasing
  double seconds = 0.0;  // wall time (timing side file only)
};
struct BenchResult {
  std::vector<BenchRow> rows;
  Json summary;
};

/// Trial t uses problem seed derive_seed(cfg.seed, t) for every mode.
BenchResult bench_command(const RunConfig& cfg);
BenchResult bench_command(const RunConfig& cfg, const std::filesystem::path& out);

// Serialization helpers shared by the CLI and tests.
Json to_json(const Reducer& r);
Reducer reducer_from_json(const Json& j);
Json to_json(const DemixingSet& d);
DemixingSet demixing_from_json(const Json& j);
Json to_json(const regress::CvReport& r);
std::string cells_csv(const regress::CvReport& r);

/// Writes manifest.json for a command.
void write_manifest(const RunConfig& cfg, const std::string& command, const std::filesystem::path& out,
                    const Json& extra = Json::object());

}  // namespace ivafuse::pipeline
