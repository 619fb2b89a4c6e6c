#include "ivafuse/config.hpp"

#include "support.hpp"

using namespace ivafuse;

TEST(Config, ParsesSectionsAndResolvesPaths) {
  const auto c = parse_config(
      "[run]\nseed = 42\nout = res\nmode = single:SOB\n"
      "[data]\ntables = SOB:a.csv, CME:/abs/c.csv\nlabels = y.csv\nproperty = E\n"
      "[fusion]\norder = 7\nwhiten = false\n"
      "[iva]\ntol = 1e-8\ninit = perturbed\nrestarts = 2\n"
      "[cv]\nrepeats = 3\nlambda_grid = 0.1, 0.01\n"
      "[curve]\nsizes = 100,200\n[sweep]\nk = 3\n[bench]\nseeds = 5\nmodes = iva\n",
      "/base");
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.out, std::filesystem::path("/base/res"));
  EXPECT_EQ(c.fusion.mode, fusion::Mode::Single);
  EXPECT_EQ(c.fusion.single_name, "SOB");
  ASSERT_EQ(c.tables.size(), 2u);
  EXPECT_EQ(c.tables[0].path, std::filesystem::path("/base/a.csv"));
  EXPECT_EQ(c.tables[1].path, std::filesystem::path("/abs/c.csv"));
  EXPECT_EQ(c.fusion.order, 7);
  EXPECT_FALSE(c.fusion.whiten);
  EXPECT_EQ(c.fusion.iva.tol, 1e-8);
  EXPECT_EQ(c.fusion.iva.init, IvaInit::SeededPerturbation);
  EXPECT_EQ(c.fusion.iva.seed, 42u);
  EXPECT_EQ(c.cv.seed, 42u);
  EXPECT_EQ(c.cv.repeats, 3);
  EXPECT_EQ(c.cv.lambda_grid, (std::vector<double>{0.1, 0.01}));
  EXPECT_EQ(c.curve_sizes, (std::vector<Index>{100, 200}));
  EXPECT_EQ(c.sweep_k, 3);
  EXPECT_EQ(c.bench.seeds, 5);
  EXPECT_EQ(c.bench.modes, (std::vector<std::string>{"iva"}));
}

TEST(Config, Defaults) {
  const auto c = parse_config("");
  EXPECT_EQ(c.fusion.mode, fusion::Mode::Iva);
  EXPECT_EQ(c.fusion.order, 10);
  EXPECT_EQ(c.cv.outer_folds, 5);
  EXPECT_EQ(c.cv.repeats, 30);
  EXPECT_EQ(c.bench.K, 3);
  EXPECT_EQ(c.bench.N, 5000);
  EXPECT_EQ(c.bench.rho, 0.5);
}

TEST(Config, RejectsUnknownAndMalformed) {
  EXPECT_THROW(parse_config("[run]\nsede = 1\n"), Error);
  EXPECT_THROW(parse_config("[extra]\na = 1\n"), Error);
  EXPECT_THROW(parse_config("[run]\nseed = many\n"), Error);
  EXPECT_THROW(parse_config("[run]\nmode = pca\n"), Error);
  EXPECT_THROW(parse_config("[fusion]\nwhiten = maybe\n"), Error);
  EXPECT_THROW(parse_config("[data]\ntables = nocolon.csv\n"), Error);
  EXPECT_THROW(parse_config("[iva]\ninit = random\n"), Error);
  EXPECT_THROW(parse_config("[iva]\nstep_size = -1\n"), Error);
  EXPECT_THROW(parse_config("[cv]\nsigma_scales = 1, x\n"), Error);
  EXPECT_THROW(parse_config("[cv]\ntrain = 0.5\n"), Error);
  EXPECT_THROW(load_config("/nonexistent/run.ini"), Error);
}

TEST(Config, SnapshotRoundTrips) {
  const auto c = parse_config("[run]\nseed = 3\nmode = regular\njobs = 4\n[cv]\nsigma_scales = 0.5,1\n", "/b");
  const auto again = parse_config(c.snapshot());
  EXPECT_EQ(again.snapshot(), c.snapshot());
  EXPECT_EQ(again.hash(), c.hash());
  EXPECT_EQ(c.hash().size(), 16u);
  EXPECT_EQ(c.snapshot().find("jobs"), std::string::npos);
  EXPECT_NE(parse_config("[run]\nseed = 4\n").hash(), parse_config("[run]\nseed = 3\n").hash());
}

TEST(Config, ShippedExamplesParse) {
  const std::filesystem::path dir = std::filesystem::path(TEST_DATA_DIR) / ".." / ".." / "configs";
  const auto q = load_config(dir / "qm7b.ini");
  EXPECT_EQ(q.tables.size(), 3u);
  EXPECT_EQ(q.cv.repeats, 30);
  const auto b = load_config(dir / "bench.ini");
  EXPECT_EQ(b.bench.seeds, 50);
}
