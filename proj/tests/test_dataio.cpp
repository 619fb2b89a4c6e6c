#include "ivafuse/dataio.hpp"

#include "support.hpp"

using namespace ivafuse;
using testing_support::scratch_dir;
using testing_support::write_file;

namespace {

template <class F>
ParseError parse_error(F&& f) {
  try {
    f();
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "no ParseError";
  return ParseError("", 0, 0);
}

}  // namespace

TEST(FeatureTable, LoadsThreeByTwo) {
  const auto p = write_file(scratch_dir("t") / "a.csv", "id,f1,f2\nm1,1,2\nm2,3,4.5\nm3,-1e-3,0\n");
  const auto t = dataio::load_feature_table(p, "A");
  EXPECT_EQ(t.dim(), 2);
  EXPECT_EQ(t.size(), 3);
  EXPECT_EQ(t.features, (std::vector<std::string>{"f1", "f2"}));
  EXPECT_EQ(t.molecule_ids, (std::vector<std::string>{"m1", "m2", "m3"}));
  EXPECT_DOUBLE_EQ(t.data(1, 1), 4.5);
  EXPECT_DOUBLE_EQ(t.data(0, 2), -1e-3);
}

TEST(FeatureTable, HeaderOnlyIsEmpty) {
  const auto p = write_file(scratch_dir("t") / "a.csv", "id,f1\n");
  try {
    dataio::load_feature_table(p, "A");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("empty table"), std::string::npos);
  }
}

TEST(FeatureTable, ErrorsCarryLocation) {
  const auto dir = scratch_dir("t");
  auto e = parse_error([&] { dataio::load_feature_table(write_file(dir / "r.csv", "id,a,b\nm1,1,2\nm2,3\n"), "A"); });
  EXPECT_EQ(e.line(), 3u);
  EXPECT_NE(std::string(e.what()).find("ragged"), std::string::npos);

  e = parse_error([&] { dataio::load_feature_table(write_file(dir / "n.csv", "id,a,b\nm1,1,x2\n"), "A"); });
  EXPECT_EQ(e.line(), 2u);
  EXPECT_EQ(e.column(), 3u);

  e = parse_error([&] { dataio::load_feature_table(write_file(dir / "d.csv", "id,a\nm1,1\nm1,2\n"), "A"); });
  EXPECT_EQ(e.line(), 3u);
  EXPECT_NE(std::string(e.what()).find("duplicate molecule id"), std::string::npos);

  EXPECT_THROW(dataio::load_feature_table(dir / "missing.csv", "A"), Error);
}

TEST(FeatureTable, WriteReadRoundTripIsExact) {
  FeatureTable t;
  t.name = "X";
  t.features = {"u", "v"};
  t.molecule_ids = {"a", "b"};
  t.data.resize(2, 2);
  t.data << 0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23;
  const auto p = scratch_dir("t") / "x.csv";
  dataio::write_feature_table(p, t);
  const auto back = dataio::load_feature_table(p, "X");
  EXPECT_EQ(back.data, t.data);
  EXPECT_EQ(back.molecule_ids, t.molecule_ids);
}

TEST(Xyz, ParsesBlocks) {
  const auto p = write_file(scratch_dir("x") / "g.xyz",
                            "2\nh2\nH 0 0 0\nH 0.74 0 0\n3\nwater\nO 0 0 0.1\nH 0 0.75 -0.46\nH 0 -0.75 -0.46\n");
  const auto set = dataio::load_xyz_set(p);
  ASSERT_EQ(set.molecules.size(), 2u);
  EXPECT_EQ(set.molecules[0].id, "h2");
  EXPECT_EQ(set.molecules[1].atoms[0].z, 8);
  EXPECT_DOUBLE_EQ(set.molecules[0].atoms[1].position.x(), 0.74);
}

TEST(Xyz, Errors) {
  const auto dir = scratch_dir("x");
  auto e = parse_error([&] { dataio::load_xyz_set(write_file(dir / "a.xyz", "3\nm\nH 0 0 0\nH 1 0 0\n")); });
  EXPECT_NE(std::string(e.what()).find("block at line 1"), std::string::npos);
  e = parse_error([&] { dataio::load_xyz_set(write_file(dir / "b.xyz", "1\nm\nXx 0 0 0\n")); });
  EXPECT_EQ(e.line(), 3u);
  e = parse_error([&] { dataio::load_xyz_set(write_file(dir / "c.xyz", "1\nm\nC 0 zero 0\n")); });
  EXPECT_EQ(e.column(), 3u);
  e = parse_error([&] { dataio::load_xyz_set(write_file(dir / "d.xyz", "2\nm\nC 0 0 0\nH 0 0 0\n")); });
  EXPECT_NE(std::string(e.what()).find("coincident"), std::string::npos);
}

TEST(Labels, UnitsAndUnknownProperty) {
  const auto p = write_file(scratch_dir("l") / "y.csv", "id,E [kcal/mol],gap\nm1,1.5,2\nm2,-3,4\n");
  const auto y = dataio::load_labels(p, "E");
  EXPECT_EQ(y.units, "kcal/mol");
  EXPECT_EQ(y.values(1), -3.0);
  EXPECT_EQ(dataio::label_columns(p), (std::vector<std::string>{"E", "gap"}));
  try {
    dataio::load_labels(p, "HOMO");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("E, gap"), std::string::npos) << e.what();
  }
}

TEST(Smiles, FileWithAndWithoutIds) {
  const auto p = write_file(scratch_dir("s") / "m.smi", "CCO\tethanol\n\nC#N\n");
  const auto recs = dataio::load_smiles_file(p);
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0].id, "ethanol");
  EXPECT_EQ(recs[1].smiles, "C#N");
  EXPECT_EQ(recs[1].id, "mol3");
}

TEST(Align, ReordersToFirstTable) {
  FeatureTable a{"A", {"x"}, Matrix(1, 3), {"p", "q", "r"}};
  a.data << 1, 2, 3;
  FeatureTable b{"B", {"y"}, Matrix(1, 3), {"r", "p", "q"}};
  b.data << 30, 10, 20;
  const auto out = dataio::align_tables({a, b});
  EXPECT_EQ(out[1].molecule_ids, a.molecule_ids);
  EXPECT_EQ(out[1].data(0, 0), 10);
  EXPECT_EQ(out[1].data(0, 2), 30);
  FeatureTable c{"C", {"z"}, Matrix::Zero(1, 2), {"p", "q"}};
  EXPECT_THROW(dataio::align_tables({a, c}), Error);

  LabelVector y{"E", "", Vector(3), {"q", "r", "p"}};
  y.values << 2, 3, 1;
  const auto ya = dataio::align_labels(y, a.molecule_ids);
  EXPECT_EQ(ya.values, Vector::LinSpaced(3, 1, 3));
}
