#include "ivafuse/featurize.hpp"
#include "ivafuse/linalg.hpp"

#include <Eigen/Eigenvalues>

#include "support.hpp"

using namespace ivafuse;

namespace {

Geometry make_geometry(std::vector<std::pair<std::string, Eigen::Vector3d>> atoms) {
  Geometry g;
  g.id = "g";
  for (auto& [sym, pos] : atoms) g.atoms.push_back({sym, *dataio::atomic_number(sym), pos});
  return g;
}

Geometry methane_geometry() {
  const double a = 0.629;
  return make_geometry({{"C", {0, 0, 0}}, {"H", {a, a, a}}, {"H", {-a, -a, a}}, {"H", {-a, a, -a}}, {"H", {a, -a, -a}}});
}

}  // namespace

TEST(Sob, MethaneIsFourCH) {
  const std::vector<MoleculeGraph> g{parse_smiles("C", "methane")};
  const auto vocab = featurize::build_bond_vocabulary(g);
  EXPECT_EQ(vocab.keys, (std::vector<std::string>{"C-H"}));
  const auto t = featurize::sum_over_bonds(g, vocab);
  EXPECT_EQ(t.data(0, 0), 4.0);
}

TEST(Sob, KeysSortedAndInvariantToRewriting) {
  const std::vector<MoleculeGraph> g{parse_smiles("OCC"), parse_smiles("CCO"), parse_smiles("C#N"),
                                     parse_smiles("c1ccccc1")};
  const auto vocab = featurize::build_bond_vocabulary(g);
  EXPECT_TRUE(std::is_sorted(vocab.keys.begin(), vocab.keys.end()));
  const auto t = featurize::sum_over_bonds(g, vocab);
  EXPECT_EQ(t.data.col(0), t.data.col(1));
  const auto at = [&](const std::string& k) {
    return std::find(vocab.keys.begin(), vocab.keys.end(), k) - vocab.keys.begin();
  };
  EXPECT_EQ(t.data(at("C#N"), 2), 1.0);
  EXPECT_EQ(t.data(at("C:C"), 3), 6.0);
  EXPECT_EQ(t.data(at("H-O"), 0), 1.0);
  const std::vector<MoleculeGraph> other{parse_smiles("CF")};
  EXPECT_THROW(featurize::sum_over_bonds(other, vocab), Error);
}

TEST(We, MethaneSpectrumPadded) {
  const auto v = featurize::weight_eigenspectrum(parse_smiles("C"), 7);
  Vector expect(7);
  expect << 2, 0, 0, 0, -2, 0, 0;
  EXPECT_LE((v - expect).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_THROW(featurize::weight_eigenspectrum(parse_smiles("C"), 4), Error);
}

TEST(We, TracelessAndPermutationInvariant) {
  for (const char* s : {"CCO", "c1ccccc1", "CC(=O)O", "C#CC=C"}) {
    const auto a = featurize::weight_eigenspectrum(parse_smiles(s), 20);
    EXPECT_NEAR(a.sum(), 0.0, 1e-10) << s;
  }
  EXPECT_LE((featurize::weight_eigenspectrum(parse_smiles("OCC"), 12) -
             featurize::weight_eigenspectrum(parse_smiles("CCO"), 12))
                .cwiseAbs()
                .maxCoeff(),
            1e-12);
}

TEST(Cme, DiagonalEntry) {
  const Geometry c = make_geometry({{"C", {0, 0, 0}}});
  EXPECT_NEAR(featurize::coulomb_matrix(c)(0, 0), 36.858105, 1e-6);
  EXPECT_NEAR(featurize::coulomb_matrix(c)(0, 0), 0.5 * std::pow(6.0, 2.4), 1e-12);
}

TEST(Cme, HydrogenMoleculeClosedForm) {
  const double r = 0.74;
  const auto v = featurize::coulomb_eigenspectrum(make_geometry({{"H", {0, 0, 0}}, {"H", {r, 0, 0}}}), 3);
  const double off = 1.0 / (r * featurize::kBohrPerAngstrom);
  EXPECT_NEAR(v(0), 0.5 + off, 1e-12);
  EXPECT_NEAR(v(1), 0.5 - off, 1e-12);
  EXPECT_EQ(v(2), 0.0);
}

TEST(Cme, TraceIdentity) {
  const auto g = methane_geometry();
  const auto v = featurize::coulomb_eigenspectrum(g, 23);
  const double trace = 0.5 * std::pow(6.0, 2.4) + 4 * 0.5;
  EXPECT_LE(std::abs(v.sum() - trace) / trace, 1e-8);
}

TEST(Cme, PermutationInvariant) {
  auto g = methane_geometry();
  const auto a = featurize::coulomb_eigenspectrum(g, 5);
  std::swap(g.atoms[0], g.atoms[3]);
  EXPECT_LE((featurize::coulomb_eigenspectrum(g, 5) - a).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Spectra, EigensolverAgreesWithReferenceOnFeaturizerMatrices) {
  for (const char* s : {"C", "CCO", "c1ccccc1", "CC(=O)Oc1ccccc1C(=O)O"}) {
    const Matrix w = featurize::weight_matrix(parse_smiles(s));
    Eigen::SelfAdjointEigenSolver<Matrix> es(w, Eigen::EigenvaluesOnly);
    EXPECT_LE((linalg::symmetric_eigenvalues(w) - es.eigenvalues().reverse()).cwiseAbs().maxCoeff(), 1e-10) << s;
  }
  const Matrix c = featurize::coulomb_matrix(methane_geometry());
  Eigen::SelfAdjointEigenSolver<Matrix> es(c, Eigen::EigenvaluesOnly);
  EXPECT_LE((linalg::symmetric_eigenvalues(c) - es.eigenvalues().reverse()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Batch, TablesHaveLabelsAndIds) {
  const std::vector<MoleculeGraph> g{parse_smiles("C", "a"), parse_smiles("CC", "b")};
  EXPECT_EQ(featurize::max_atom_count(g), 8);
  const auto we = featurize::weight_eigenspectra(g, 8);
  EXPECT_EQ(we.dim(), 8);
  EXPECT_EQ(we.features.front(), "WE_1");
  EXPECT_EQ(we.molecule_ids, (std::vector<std::string>{"a", "b"}));
  GeometrySet set{{methane_geometry()}};
  const auto cme = featurize::coulomb_eigenspectra(set, 23);
  EXPECT_EQ(cme.dim(), 23);
  EXPECT_EQ(cme.features.back(), "CME_23");
  EXPECT_THROW(featurize::coulomb_eigenspectra(set, 3), Error);
}
