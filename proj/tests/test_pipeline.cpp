#include "ivafuse/pipeline.hpp"

#include "support.hpp"

using namespace ivafuse;
using testing_support::random_matrix;
using testing_support::scratch_dir;
using testing_support::slurp;

namespace {

const std::filesystem::path kData = TEST_DATA_DIR;

RunConfig tiny(const std::filesystem::path& out) {
  RunConfig cfg = load_config(kData / "tiny.ini");
  cfg.out = out;
  cfg.fusion.iva.restarts = 1;
  return cfg;
}

// Tables whose shapes mirror the three QM7b featurizations.
std::vector<FeatureTable> qm7b_shaped(Index n) {
  std::vector<std::string> ids;
  for (Index i = 0; i < n; ++i) ids.push_back("q" + std::to_string(i));
  const Matrix z = random_matrix(12, n, 1);
  std::vector<FeatureTable> out;
  const std::vector<std::pair<std::string, Index>> shapes{{"SOB", 28}, {"CME", 23}, {"WE", 23}};
  unsigned seed = 10;
  for (const auto& [name, d] : shapes) {
    FeatureTable t{name, {}, random_matrix(d, 12, seed) * z + 0.1 * random_matrix(d, n, seed + 1), ids};
    for (Index j = 0; j < d; ++j) t.features.push_back(name + std::to_string(j + 1));
    out.push_back(std::move(t));
    seed += 2;
  }
  return out;
}

LabelVector labels_for(const FeatureTable& t) {
  return {"E", "kcal/mol", t.data.colwise().sum().transpose(), t.molecule_ids};
}

}  // namespace

TEST(Combinations, BinomialCounts) {
  EXPECT_EQ(pipeline::combinations(7, 2).size(), 21u);
  EXPECT_EQ(pipeline::combinations(7, 3).size(), 35u);
  EXPECT_EQ(pipeline::combinations(7, 7).size(), 1u);
  EXPECT_EQ(pipeline::combinations(4, 1).size(), 4u);
  const auto c = pipeline::combinations(4, 2);
  EXPECT_EQ(c.front(), (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(c.back(), (std::vector<std::size_t>{2, 3}));
  EXPECT_THROW(pipeline::combinations(3, 0), Error);
  EXPECT_THROW(pipeline::combinations(3, 4), Error);
}

TEST(Featurize, WritesTablesFromSmilesAndXyz) {
  const auto out = scratch_dir("f");
  const auto tables = pipeline::featurize(tiny(out));
  ASSERT_EQ(tables.size(), 3u);
  EXPECT_EQ(tables[0].name, "SOB");
  EXPECT_EQ(tables[0].size(), 6);
  EXPECT_EQ(tables[1].dim(), 12);  // benzene with hydrogens
  EXPECT_EQ(tables[2].dim(), 5);
  const auto back = dataio::load_feature_table(out / "SOB.csv", "SOB");
  EXPECT_EQ(back.data, tables[0].data);
  EXPECT_TRUE(std::filesystem::exists(out / "manifest.json"));
  const auto m = pipeline::Json::parse(slurp(out / "manifest.json"));
  EXPECT_EQ(m["feature_dims"]["WE"], 12);
}

TEST(Dimensions, RegularAndIvaFusedSizes) {
  const auto tables = qm7b_shaped(120);
  const auto labels = labels_for(tables[0]);
  RunConfig cfg;
  cfg.cv.repeats = 1;
  cfg.cv.outer_folds = 1;
  cfg.cv.sigma_scales = {1.0};
  cfg.cv.lambda_grid = {1e-3};
  cfg.fusion.iva.restarts = 1;

  cfg.fusion = fusion::parse_mode("regular", cfg.fusion);
  const auto out = scratch_dir("r");
  EXPECT_EQ(pipeline::run_pipeline(cfg, tables, labels, out).feature_dim, 74);
  EXPECT_EQ(pipeline::Json::parse(slurp(out / "manifest.json"))["fused_dim"], 74);

  cfg.fusion = fusion::parse_mode("iva", cfg.fusion);
  const auto out2 = scratch_dir("i");
  EXPECT_EQ(pipeline::run_pipeline(cfg, tables, labels, out2).feature_dim, 30);
  EXPECT_EQ(pipeline::Json::parse(slurp(out2 / "manifest.json"))["fused_dim"], 30);
  EXPECT_TRUE(std::filesystem::exists(out2 / "demixing.json"));
}

TEST(Sweep, FullSubsetDimensions) {
  const auto tables = qm7b_shaped(60);
  RunConfig cfg;
  cfg.cv.repeats = 1;
  cfg.cv.outer_folds = 1;
  cfg.cv.sigma_scales = {1.0};
  cfg.cv.lambda_grid = {1e-3};
  cfg.fusion.order = 4;
  cfg.fusion.iva.restarts = 1;
  const auto rep = pipeline::combination_sweep(cfg, tables, labels_for(tables[0]), 3, scratch_dir("s"));
  ASSERT_EQ(rep.rows.size(), 1u);
  EXPECT_EQ(rep.rows[0].iva_dim, 12);
  EXPECT_EQ(rep.rows[0].regular_dim, 74);
  const auto two = pipeline::combination_sweep(cfg, tables, labels_for(tables[0]), 2, scratch_dir("s2"));
  EXPECT_EQ(two.rows.size(), 3u);
  EXPECT_EQ(two.rows[2].members, (std::vector<std::string>{"CME", "WE"}));
}

TEST(MixingReport, IdentityDemixingGivesPseudoInverse) {
  const auto out = scratch_dir("m");
  const Matrix x = random_matrix(5, 5, 3) * random_matrix(5, 200, 4);
  Reducer r = multiset::fit_reducer(x, 3, true, "SOB");
  r.feature_labels = {"C-H", "C-C", "C#N", "C#C", "C=O"};
  DemixingSet d;
  d.W = {Matrix::Identity(3, 3)};
  d.cost_trace = {1.0};
  dataio::write_text(out / "reducers.json", pipeline::Json::array({pipeline::to_json(r)}).dump());
  dataio::write_text(out / "demixing.json", pipeline::to_json(d).dump());
  const auto rep = pipeline::mixing_report(out, out);
  ASSERT_EQ(rep.mixing.size(), 1u);
  EXPECT_EQ(rep.mixing[0].rows(), 5);
  EXPECT_EQ(rep.mixing[0].cols(), 3);
  EXPECT_LE((rep.mixing[0] - multiset::reducer_pinv(r)).cwiseAbs().maxCoeff(), 1e-12);
  for (const auto& source : rep.weights[0]) {
    for (std::size_t i = 1; i < source.size(); ++i) EXPECT_GE(std::abs(source[i - 1].weight), std::abs(source[i].weight));
  }
  EXPECT_TRUE(std::filesystem::exists(out / "mixing_SOB.csv"));
  EXPECT_THROW(pipeline::mixing_report(scratch_dir("empty"), out), Error);
}

TEST(Serialization, ExactRoundTrip) {
  const Matrix x = random_matrix(4, 4, 5) * random_matrix(4, 50, 6);
  const Reducer r = multiset::fit_reducer(x, 2, true, "A");
  const Reducer back = pipeline::reducer_from_json(pipeline::Json::parse(pipeline::to_json(r).dump()));
  EXPECT_EQ(back.F, r.F);
  EXPECT_EQ(back.mean, r.mean);
  EXPECT_EQ(back.eigenvectors, r.eigenvectors);
  DemixingSet d;
  d.W = {random_matrix(2, 2, 7)};
  d.cost_trace = {3.0, 2.0 / 3.0};
  d.final_cost = 2.0 / 3.0;
  d.seed = 18446744073709551557ULL;
  const auto dd = pipeline::demixing_from_json(pipeline::Json::parse(pipeline::to_json(d).dump()));
  EXPECT_EQ(dd.W[0], d.W[0]);
  EXPECT_EQ(dd.cost_trace, d.cost_trace);
  EXPECT_EQ(dd.seed, d.seed);
}

TEST(Bench, RowsAndSummary) {
  auto cfg = tiny(scratch_dir("b"));
  const auto res = pipeline::bench_command(cfg);
  EXPECT_EQ(res.rows.size(), 6u);
  EXPECT_TRUE(res.summary.contains("iva"));
  EXPECT_TRUE(res.summary["ica"].contains("median"));
  EXPECT_TRUE(res.summary.contains("paired"));
  const auto csv = slurp(cfg.out / "bench.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);
}

TEST(Determinism, RepeatedCommandsAreBitIdentical) {
  const auto out = scratch_dir("d");
  auto cfg = tiny(out);
  const std::vector<std::string> files{"cv_report.json", "cv_cells.csv", "reducers.json", "demixing.json",
                                       "manifest.json", "bench.csv", "bench_summary.json", "fused.csv"};
  auto run_all = [&] {
    pipeline::run_pipeline(cfg);
    pipeline::bench_command(cfg);
    pipeline::fuse(cfg);
    std::vector<std::string> bytes;
    for (const auto& f : files) bytes.push_back(slurp(out / f));
    return bytes;
  };
  const auto first = run_all();
  const auto second = run_all();
  for (std::size_t i = 0; i < files.size(); ++i) {
    EXPECT_FALSE(first[i].empty()) << files[i];
    EXPECT_EQ(first[i], second[i]) << files[i];
  }
}

TEST(LearningCurveRun, RowsFitAndErrors) {
  auto cfg = tiny(scratch_dir("c"));
  cfg.fusion = fusion::parse_mode("regular", cfg.fusion);
  const auto lc = pipeline::learning_curve_run(cfg, {30, 60});
  ASSERT_EQ(lc.points.size(), 2u);
  EXPECT_EQ(lc.points[1].n, 60);
  EXPECT_TRUE(std::isfinite(lc.fit.alpha));
  EXPECT_TRUE(std::filesystem::exists(cfg.out / "learning_curve.csv"));
  EXPECT_THROW(pipeline::learning_curve_run(cfg, {30, 61}), Error);
  EXPECT_THROW(pipeline::learning_curve_run(cfg, {40, 30}), Error);
}

TEST(Subsample, SeededAndOrdered) {
  auto cfg = tiny(scratch_dir("sub"));
  cfg.subsample = 25;
  const auto a = pipeline::load_tables(cfg);
  const auto b = pipeline::load_tables(cfg);
  EXPECT_EQ(a[0].size(), 25);
  EXPECT_EQ(a[0].molecule_ids, b[0].molecule_ids);
  EXPECT_TRUE(std::is_sorted(a[0].molecule_ids.begin(), a[0].molecule_ids.end()));
  EXPECT_EQ(a[1].molecule_ids, a[0].molecule_ids);
}
