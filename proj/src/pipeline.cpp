#include "ivafuse/pipeline.hpp"

#include "ivafuse/featurize.hpp"
#include "ivafuse/multiset.hpp"
#include "ivafuse/parallel.hpp"
#include "ivafuse/rng.hpp"
#include "ivafuse/smiles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace ivafuse::pipeline {

namespace fs = std::filesystem;

namespace {

Json matrix_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from(const Json& j) {
  const auto rows = static_cast<Index>(j.size());
  const auto cols = rows ? static_cast<Index>(j.at(0).size()) : 0;
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    if (static_cast<Index>(j.at(i).size()) != cols) throw Error("json: ragged matrix");
    for (Index c = 0; c < cols; ++c) m(i, c) = j.at(i).at(c).get<double>();
  }
  return m;
}

Json vector_json(const Vector& v) {
  Json a = Json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Vector vector_from(const Json& j) {
  Vector v(static_cast<Index>(j.size()));
  for (Index i = 0; i < v.size(); ++i) v(i) = j.at(i).get<double>();
  return v;
}

Json summary_json(const stats::Summary& s) {
  return Json{{"mean", s.mean}, {"std", s.std},   {"median", s.median}, {"q1", s.q1},
              {"q3", s.q3},     {"min", s.min},   {"max", s.max},       {"count", s.count}};
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw Error("missing artifact: " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_json(const fs::path& p, const Json& j) { dataio::write_text(p, j.dump(2) + "\n"); }

std::string fmt(double v) { return dataio::format_double(v); }

std::vector<FeatureTable> subsample(const std::vector<FeatureTable>& tables, Index n, std::uint64_t seed) {
  const Index total = tables.front().size();
  if (n <= 0 || n >= total) return tables;
  std::vector<Index> perm(static_cast<std::size_t>(total));
  std::iota(perm.begin(), perm.end(), Index{0});
  Rng rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  perm.resize(static_cast<std::size_t>(n));
  std::sort(perm.begin(), perm.end());
  std::vector<FeatureTable> out;
  for (const auto& t : tables) out.push_back(dataio::select_columns(t, perm));
  return out;
}

// Seed-stream tags keep the different random uses of one global seed apart.
constexpr std::uint64_t kSubsampleStream = 0x5u;
constexpr std::uint64_t kCurveStream = 0xc0u;

void write_fusion_artifacts(const fusion::Model& model, const fs::path& out) {
  if (!model.demixing) return;
  Json reducers = Json::array();
  for (const auto& r : model.reducers) reducers.push_back(to_json(r));
  write_json(out / "reducers.json", reducers);
  Json demix = to_json(*model.demixing);
  demix["mode"] = fusion::mode_name(model.spec);
  write_json(out / "demixing.json", demix);
}

std::vector<Index> all_columns(Index n) {
  std::vector<Index> c(static_cast<std::size_t>(n));
  std::iota(c.begin(), c.end(), Index{0});
  return c;
}

}  // namespace

// ---------------------------------------------------------------- serialization

Json to_json(const Reducer& r) {
  return Json{{"name", r.name},
              {"feature_labels", r.feature_labels},
              {"mean", vector_json(r.mean)},
              {"F", matrix_json(r.F)},
              {"eigenvalues", vector_json(r.eigenvalues)},
              {"eigenvectors", matrix_json(r.eigenvectors)},
              {"whitened", r.whitened}};
}

Reducer reducer_from_json(const Json& j) {
  Reducer r;
  r.name = j.at("name").get<std::string>();
  r.feature_labels = j.at("feature_labels").get<std::vector<std::string>>();
  r.mean = vector_from(j.at("mean"));
  r.F = matrix_from(j.at("F"));
  r.eigenvalues = vector_from(j.at("eigenvalues"));
  r.eigenvectors = matrix_from(j.at("eigenvectors"));
  r.whitened = j.at("whitened").get<bool>();
  return r;
}

Json to_json(const DemixingSet& d) {
  Json w = Json::array();
  for (const auto& m : d.W) w.push_back(matrix_json(m));
  return Json{{"W", w},
              {"iterations", d.iterations},
              {"final_cost", d.final_cost},
              {"cost_trace", d.cost_trace},
              {"converged", d.converged},
              {"seed", d.seed}};
}

DemixingSet demixing_from_json(const Json& j) {
  DemixingSet d;
  for (const auto& m : j.at("W")) d.W.push_back(matrix_from(m));
  d.iterations = j.at("iterations").get<int>();
  d.final_cost = j.at("final_cost").get<double>();
  d.cost_trace = j.at("cost_trace").get<std::vector<double>>();
  d.converged = j.at("converged").get<bool>();
  d.seed = j.at("seed").get<std::uint64_t>();
  return d;
}

Json to_json(const regress::CvReport& r) {
  Json cells = Json::array();
  for (const auto& c : r.cells) {
    cells.push_back(Json{{"repeat", c.repeat},
                         {"fold", c.fold},
                         {"test_mae", c.test_mae},
                         {"validation_mae", c.validation_mae},
                         {"sigma", c.sigma},
                         {"sigma_scale", c.sigma_scale},
                         {"lambda", c.lambda},
                         {"feature_dim", c.feature_dim},
                         {"n_train", c.n_train},
                         {"n_validation", c.n_validation},
                         {"n_test", c.n_test}});
  }
  return Json{{"property", r.property},
              {"units", r.units},
              {"feature_set", r.feature_set},
              {"n_used", r.n_used},
              {"feature_dim", r.feature_dim},
              {"refit", "train+validation"},
              {"summary", summary_json(r.summary)},
              {"pooled_mae", r.pooled_mae},
              {"cells", cells}};
}

std::string cells_csv(const regress::CvReport& r) {
  std::ostringstream os;
  os << "repeat,fold,test_mae,validation_mae,sigma,sigma_scale,lambda,feature_dim,n_train,n_validation,n_test\n";
  for (const auto& c : r.cells) {
    os << c.repeat << ',' << c.fold << ',' << fmt(c.test_mae) << ',' << fmt(c.validation_mae) << ','
       << fmt(c.sigma) << ',' << fmt(c.sigma_scale) << ',' << fmt(c.lambda) << ',' << c.feature_dim << ','
       << c.n_train << ',' << c.n_validation << ',' << c.n_test << '\n';
  }
  return os.str();
}

void write_manifest(const RunConfig& cfg, const std::string& command, const fs::path& out, const Json& extra) {
  Json m{{"tool", "ivafuse"},
         {"version", IVAFUSE_VERSION},
         {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                       std::to_string(EIGEN_MINOR_VERSION)},
         {"command", command},
         {"seed", cfg.seed},
         {"config_hash", cfg.hash()},
         {"config", cfg.snapshot()}};
  for (const auto& [k, v] : extra.items()) m[k] = v;
  write_json(out / "manifest.json", m);
  dataio::write_text(out / "config.ini", cfg.snapshot());
}

// ---------------------------------------------------------------- loading

std::vector<FeatureTable> load_tables(const RunConfig& cfg) {
  if (cfg.tables.empty()) throw Error("config: [data] tables is empty");
  std::vector<FeatureTable> tables;
  for (const auto& ref : cfg.tables) tables.push_back(dataio::load_feature_table(ref.path, ref.name));
  tables = dataio::align_tables(std::move(tables));
  return subsample(tables, cfg.subsample, derive_seed(cfg.seed, kSubsampleStream));
}

LabelVector load_run_labels(const RunConfig& cfg) {
  if (cfg.labels.empty() || cfg.property.empty()) throw Error("config: [data] labels and property are required");
  return dataio::load_labels(cfg.labels, cfg.property);
}

// ---------------------------------------------------------------- commands

std::vector<FeatureTable> featurize(const RunConfig& cfg) {
  std::vector<FeatureTable> out;
  Json dims = Json::object();
  if (!cfg.smiles.empty()) {
    const auto records = dataio::load_smiles_file(cfg.smiles);
    std::vector<MoleculeGraph> graphs(records.size());
    parallel_for(static_cast<long>(records.size()), [&](long i) {
      try {
        graphs[i] = parse_smiles(records[i].smiles, records[i].id);
      } catch (const ParseError& e) {
        throw ParseError("molecule " + records[i].id + ": " + e.what(), e.line(), e.column(), e.offset());
      }
    });
    const auto vocab = featurize::build_bond_vocabulary(graphs);
    out.push_back(featurize::sum_over_bonds(graphs, vocab, "SOB"));
    const Index dmax = cfg.dmax > 0 ? cfg.dmax : featurize::max_atom_count(graphs);
    out.push_back(featurize::weight_eigenspectra(graphs, dmax, "WE"));
  }
  if (!cfg.xyz.empty()) {
    const auto geoms = dataio::load_xyz_set(cfg.xyz);
    const Index dmax = cfg.dmax > 0 ? cfg.dmax : featurize::max_atom_count(geoms);
    out.push_back(featurize::coulomb_eigenspectra(geoms, dmax, "CME"));
  }
  if (out.empty()) throw Error("featurize: set [data] smiles and/or xyz");
  for (const auto& t : out) {
    dataio::write_feature_table(cfg.out / (t.name + ".csv"), t);
    dims[t.name] = t.dim();
  }
  write_manifest(cfg, "featurize", cfg.out, Json{{"feature_dims", dims}, {"molecules", out.front().size()}});
  return out;
}

fusion::Model fuse(const RunConfig& cfg) {
  const auto tables = load_tables(cfg);
  const auto cols = all_columns(tables.front().size());
  const auto model = fusion::fit(tables, cols, cfg.fusion);
  FeatureTable fused;
  fused.name = fusion::mode_name(cfg.fusion);
  fused.data = fusion::apply(model, tables, cols);
  fused.features = fusion::feature_labels(model, tables);
  fused.molecule_ids = tables.front().molecule_ids;
  dataio::write_feature_table(cfg.out / "fused.csv", fused);
  write_fusion_artifacts(model, cfg.out);
  write_manifest(cfg, "fuse", cfg.out,
                 Json{{"mode", fusion::mode_name(cfg.fusion)}, {"fused_dim", fused.dim()}, {"molecules", fused.size()}});
  return model;
}

regress::CvReport run_pipeline(const RunConfig& cfg, const std::vector<FeatureTable>& tables,
                               const LabelVector& labels, const fs::path& out) {
  const auto report = regress::nested_cv(tables, labels, cfg.cv, cfg.fusion);
  write_json(out / "cv_report.json", to_json(report));
  dataio::write_text(out / "cv_cells.csv", cells_csv(report));

  // Whole-data fit, kept for back-reconstruction reports only.
  const auto model = fusion::fit(tables, all_columns(tables.front().size()), cfg.fusion);
  write_fusion_artifacts(model, out);

  Json dims = Json::object();
  for (const auto& t : tables) dims[t.name] = t.dim();
  write_manifest(cfg, "train", out,
                 Json{{"mode", fusion::mode_name(cfg.fusion)},
                      {"feature_dims", dims},
                      {"fused_dim", report.feature_dim},
                      {"molecules", report.n_used},
                      {"property", report.property}});
  return report;
}

regress::CvReport run_pipeline(const RunConfig& cfg) {
  return run_pipeline(cfg, load_tables(cfg), load_run_labels(cfg), cfg.out);
}

LearningCurve learning_curve_run(const RunConfig& cfg, const std::vector<FeatureTable>& tables,
                                 const LabelVector& labels, const std::vector<Index>& sizes,
                                 const fs::path& out) {
  if (sizes.empty()) throw Error("learning curve: no sizes");
  if (!std::is_sorted(sizes.begin(), sizes.end())) throw Error("learning curve: sizes must be ascending");
  const Index available = tables.front().size();
  LearningCurve curve;
  curve.feature_set = fusion::mode_name(cfg.fusion);
  std::vector<std::pair<double, double>> pts;
  std::ostringstream csv;
  csv << "n,mae,pooled_mae\n";
  for (Index n : sizes) {
    if (n > available) {
      throw Error("learning curve: size " + std::to_string(n) + " exceeds the " + std::to_string(available) +
                  " available molecules");
    }
    const auto sub = subsample(tables, n, derive_seed(cfg.seed, kCurveStream + static_cast<std::uint64_t>(n)));
    const auto report = regress::nested_cv(sub, labels, cfg.cv, cfg.fusion);
    curve.points.push_back({n, report.summary.mean, report.pooled_mae});
    pts.emplace_back(static_cast<double>(n), report.summary.mean);
    csv << n << ',' << fmt(report.summary.mean) << ',' << fmt(report.pooled_mae) << '\n';
  }
  curve.fit = regress::fit_learning_curve(pts);
  dataio::write_text(out / "learning_curve.csv", csv.str());
  write_json(out / "learning_curve.json",
             Json{{"feature_set", curve.feature_set}, {"C", curve.fit.c}, {"alpha", curve.fit.alpha}});
  write_manifest(cfg, "curve", out, Json{{"mode", curve.feature_set}});
  return curve;
}

LearningCurve learning_curve_run(const RunConfig& cfg, const std::vector<Index>& sizes) {
  return learning_curve_run(cfg, load_tables(cfg), load_run_labels(cfg), sizes, cfg.out);
}

std::vector<std::vector<std::size_t>> combinations(std::size_t n, std::size_t k) {
  if (k < 1 || k > n) throw Error("combinations: need 1 <= k <= n");
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> c(k);
  std::iota(c.begin(), c.end(), std::size_t{0});
  while (true) {
    out.push_back(c);
    std::size_t i = k;
    while (i > 0 && c[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) break;
    ++c[i - 1];
    for (std::size_t j = i; j < k; ++j) c[j] = c[j - 1] + 1;
  }
  return out;
}

SweepReport combination_sweep(const RunConfig& cfg, const std::vector<FeatureTable>& tables,
                              const LabelVector& labels, int k, const fs::path& out) {
  SweepReport rep;
  rep.k = k;
  fusion::Spec regular = cfg.fusion;
  regular.mode = fusion::Mode::Regular;
  fusion::Spec iva = cfg.fusion;
  iva.mode = fusion::Mode::Iva;

  std::ostringstream csv;
  csv << "combination,members,regular_dim,regular_mean,regular_median,iva_dim,iva_mean,iva_median\n";
  std::vector<double> reg_means, iva_means;
  const auto combos = combinations(tables.size(), static_cast<std::size_t>(k));
  for (std::size_t ci = 0; ci < combos.size(); ++ci) {
    std::vector<FeatureTable> subset;
    SweepRow row;
    for (auto idx : combos[ci]) {
      subset.push_back(tables[idx]);
      row.members.push_back(tables[idx].name);
    }
    const auto reg = regress::nested_cv(subset, labels, cfg.cv, regular);
    const auto ivr = regress::nested_cv(subset, labels, cfg.cv, iva);
    row.regular = reg.summary;
    row.iva = ivr.summary;
    row.regular_dim = reg.feature_dim;
    row.iva_dim = ivr.feature_dim;
    reg_means.push_back(reg.summary.mean);
    iva_means.push_back(ivr.summary.mean);
    std::string members;
    for (std::size_t i = 0; i < row.members.size(); ++i) members += (i ? "+" : "") + row.members[i];
    csv << ci << ',' << members << ',' << row.regular_dim << ',' << fmt(reg.summary.mean) << ','
        << fmt(reg.summary.median) << ',' << row.iva_dim << ',' << fmt(ivr.summary.mean) << ','
        << fmt(ivr.summary.median) << '\n';
    rep.rows.push_back(std::move(row));
  }
  rep.regular_summary = stats::summarize(reg_means);
  rep.iva_summary = stats::summarize(iva_means);
  dataio::write_text(out / "sweep.csv", csv.str());
  write_json(out / "sweep_summary.json", Json{{"k", k},
                                              {"combinations", rep.rows.size()},
                                              {"regular", summary_json(rep.regular_summary)},
                                              {"iva", summary_json(rep.iva_summary)}});
  write_manifest(cfg, "sweep", out, Json{{"k", k}, {"combinations", rep.rows.size()}});
  return rep;
}

MixingReport mixing_report(const fs::path& dir, const fs::path& out) {
  const Json reducers = Json::parse(read_text(dir / "reducers.json"));
  const DemixingSet demix = demixing_from_json(Json::parse(read_text(dir / "demixing.json")));
  if (reducers.size() != demix.W.size()) throw Error("mixing report: reducer and demixing counts differ");
  MixingReport rep;
  for (std::size_t k = 0; k < reducers.size(); ++k) {
    const Reducer r = reducer_from_json(reducers[k]);
    const Matrix a = multiset::back_reconstruct(r, demix.W[k]);
    if (!a.allFinite()) throw Error("mixing report: non-finite weights for " + r.name);
    std::vector<std::string> labels = r.feature_labels;
    if (static_cast<Index>(labels.size()) != a.rows()) {
      labels.clear();
      for (Index i = 0; i < a.rows(); ++i) labels.push_back("f" + std::to_string(i + 1));
    }
    std::ostringstream csv;
    csv << "dataset,source,rank,feature,weight\n";
    std::vector<std::vector<MixingEntry>> per_source;
    for (Index p = 0; p < a.cols(); ++p) {
      std::vector<MixingEntry> entries;
      for (Index i = 0; i < a.rows(); ++i) entries.push_back({labels[static_cast<std::size_t>(i)], a(i, p)});
      std::stable_sort(entries.begin(), entries.end(), [](const MixingEntry& x, const MixingEntry& y) {
        return std::abs(x.weight) > std::abs(y.weight);
      });
      for (std::size_t e = 0; e < entries.size(); ++e) {
        csv << r.name << ',' << p + 1 << ',' << e + 1 << ',' << entries[e].feature << ',' << fmt(entries[e].weight)
            << '\n';
      }
      per_source.push_back(std::move(entries));
    }
    dataio::write_text(out / ("mixing_" + r.name + ".csv"), csv.str());
    rep.datasets.push_back(r.name);
    rep.weights.push_back(std::move(per_source));
    rep.mixing.push_back(a);
  }
  return rep;
}

BenchResult bench_command(const RunConfig& cfg, const fs::path& out) {
  const auto& b = cfg.bench;
  if (b.seeds < 1) throw Error("bench: seeds must be positive");
  std::vector<bench::Mode> modes;
  for (const auto& m : b.modes) modes.push_back(bench::parse_mode(m));
  if (modes.empty()) throw Error("bench: no modes");

  BenchResult res;
  res.rows.resize(static_cast<std::size_t>(b.seeds) * modes.size());
  parallel_for(static_cast<long>(b.seeds), [&](long t) {
    const std::uint64_t seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(t));
    const auto problem = bench::make_problem(b.K, b.P, b.N, b.rho, b.cond_bound, seed, b.independent_slices);
    IvaOptions opts = cfg.fusion.iva;
    opts.seed = seed;
    for (std::size_t m = 0; m < modes.size(); ++m) {
      const auto start = std::chrono::steady_clock::now();
      const auto rec = bench::recovery_experiment(problem, opts, modes[m]);
      BenchRow& row = res.rows[static_cast<std::size_t>(t) * modes.size() + m];
      row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      row.seed = seed;
      row.mode = bench::to_string(modes[m]);
      row.jisi = rec.jisi;
      row.mean_amari = rec.mean_amari;
      row.iterations = rec.demixing.iterations;
      row.converged = rec.demixing.converged;
      row.final_cost = rec.demixing.final_cost;
      const auto& tr = rec.demixing.cost_trace;
      row.monotone = std::adjacent_find(tr.begin(), tr.end(), std::less<double>()) == tr.end();
    }
  });

  std::ostringstream csv, timing;
  csv << "trial,seed,mode,jisi,mean_amari,iterations,converged,final_cost,monotone\n";
  timing << "trial,seed,mode,seconds\n";
  for (std::size_t i = 0; i < res.rows.size(); ++i) {
    const auto& r = res.rows[i];
    const std::size_t trial = i / modes.size();
    csv << trial << ',' << r.seed << ',' << r.mode << ',' << fmt(r.jisi) << ',' << fmt(r.mean_amari) << ','
        << r.iterations << ',' << (r.converged ? 1 : 0) << ',' << fmt(r.final_cost) << ',' << (r.monotone ? 1 : 0)
        << '\n';
    timing << trial << ',' << r.seed << ',' << r.mode << ',' << fmt(r.seconds) << '\n';
  }

  Json summary = Json::object();
  std::vector<std::vector<double>> jisi_by_mode(modes.size());
  for (std::size_t i = 0; i < res.rows.size(); ++i) jisi_by_mode[i % modes.size()].push_back(res.rows[i].jisi);
  for (std::size_t m = 0; m < modes.size(); ++m) summary[bench::to_string(modes[m])] = summary_json(stats::summarize(jisi_by_mode[m]));
  if (modes.size() == 2 && b.seeds >= 2) {
    const auto test = stats::paired_t_test(jisi_by_mode[0], jisi_by_mode[1]);
    summary["paired"] = Json{{"a", bench::to_string(modes[0])}, {"b", bench::to_string(modes[1])},
                             {"mean_diff", test.mean_diff}, {"t", test.t},
                             {"p_less", test.p_less}, {"ci95", {test.ci95_low, test.ci95_high}}};
  }
  res.summary = summary;

  dataio::write_text(out / "bench.csv", csv.str());
  dataio::write_text(out / "bench_timing.csv", timing.str());
  write_json(out / "bench_summary.json", summary);
  write_manifest(cfg, "bench", out);
  return res;
}

BenchResult bench_command(const RunConfig& cfg) { return bench_command(cfg, cfg.out); }

}  // namespace ivafuse::pipeline
