#include "ivafuse/config.hpp"
#include "ivafuse/parallel.hpp"
#include "ivafuse/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

using namespace ivafuse;

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string mode;
  int jobs = 0;
  std::string run_dir;
  int k = 0;
};

RunConfig resolve(const Flags& f) {
  RunConfig cfg = f.config.empty() ? RunConfig{} : load_config(f.config);
  if (f.seed) {
    cfg.seed = *f.seed;
    cfg.fusion.iva.seed = *f.seed;
    cfg.cv.seed = *f.seed;
  }
  if (!f.out.empty()) cfg.out = f.out;
  if (!f.mode.empty()) cfg.fusion = fusion::parse_mode(f.mode, cfg.fusion);
  if (f.jobs > 0) cfg.jobs = f.jobs;
  if (f.k > 0) cfg.sweep_k = f.k;
  return cfg;
}

void print_summary(const std::string& label, const stats::Summary& s) {
  std::cout << label << ": mean " << s.mean << " median " << s.median << " q1 " << s.q1 << " q3 " << s.q3 << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-featurization fusion with IVA and kernel ridge regression"};
  app.require_subcommand(1);
  Flags f;
  app.add_option("--config", f.config, "INI run configuration")->check(CLI::ExistingFile);
  app.add_option("--seed", f.seed, "global seed (overrides [run] seed)");
  app.add_option("--out", f.out, "output directory");
  app.add_option("--mode", f.mode, "fusion mode: regular | ica | iva | single:<name>");
  app.add_option("--jobs", f.jobs, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);

  auto* featurize = app.add_subcommand("featurize", "SOB/WE from SMILES and CME from XYZ");
  auto* fuse = app.add_subcommand("fuse", "fit the fusion on all molecules and write fused features");
  auto* train = app.add_subcommand("train", "nested cross-validated KRR of the fused features");
  auto* curve = app.add_subcommand("curve", "learning curve over [curve] sizes");
  auto* sweep = app.add_subcommand("sweep", "Regular vs IVA over all k-subsets of the tables");
  sweep->add_option("-k", f.k, "subset size (overrides [sweep] k)");
  auto* bench = app.add_subcommand("bench", "synthetic source-recovery benchmark");
  auto* report = app.add_subcommand("report", "back-reconstructed mixing weights of a run");
  report->add_option("--run", f.run_dir, "directory holding reducers.json and demixing.json");
  app.fallthrough();

  CLI11_PARSE(app, argc, argv);

  std::string stage = "config";
  try {
    const RunConfig cfg = resolve(f);
    set_jobs(cfg.jobs);
    if (featurize->parsed()) {
      stage = "featurize";
      for (const auto& t : pipeline::featurize(cfg)) {
        std::cout << t.name << ": " << t.size() << " molecules, " << t.dim() << " features\n";
      }
    } else if (fuse->parsed()) {
      stage = "fuse";
      const auto model = pipeline::fuse(cfg);
      std::cout << "fused " << fusion::mode_name(model.spec) << " -> " << (cfg.out / "fused.csv").string() << "\n";
    } else if (train->parsed()) {
      stage = "train";
      const auto rep = pipeline::run_pipeline(cfg);
      std::cout << rep.property << " [" << rep.units << "] " << rep.feature_set << " dim " << rep.feature_dim
                << " N " << rep.n_used << "\n";
      print_summary("cell MAE", rep.summary);
      std::cout << "pooled MAE: " << rep.pooled_mae << "\n";
    } else if (curve->parsed()) {
      stage = "curve";
      const auto lc = pipeline::learning_curve_run(cfg, cfg.curve_sizes);
      for (const auto& p : lc.points) std::cout << p.n << "\t" << p.mae << "\n";
      std::cout << "C " << lc.fit.c << " alpha " << lc.fit.alpha << "\n";
    } else if (sweep->parsed()) {
      stage = "sweep";
      const auto rep = pipeline::combination_sweep(cfg, pipeline::load_tables(cfg), pipeline::load_run_labels(cfg),
                                                   cfg.sweep_k, cfg.out);
      std::cout << rep.rows.size() << " combinations of " << rep.k << "\n";
      print_summary("regular", rep.regular_summary);
      print_summary("iva", rep.iva_summary);
    } else if (bench->parsed()) {
      stage = "bench";
      const auto res = pipeline::bench_command(cfg);
      std::cout << res.summary.dump(2) << "\n";
    } else if (report->parsed()) {
      stage = "report";
      const std::filesystem::path dir = f.run_dir.empty() ? cfg.out : std::filesystem::path(f.run_dir);
      const auto rep = pipeline::mixing_report(dir, cfg.out);
      for (std::size_t k = 0; k < rep.datasets.size(); ++k) {
        std::cout << rep.datasets[k] << ": " << rep.mixing[k].rows() << " x " << rep.mixing[k].cols() << "\n";
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "ivafuse: [" << stage << "] " << e.what() << "\n";
    return 1;
  }
  return 0;
}
