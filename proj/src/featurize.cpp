#include "ivafuse/featurize.hpp"

#include "ivafuse/linalg.hpp"
#include "ivafuse/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

namespace ivafuse::featurize {

std::string bond_key(const std::string& a, const std::string& b, BondOrder order) {
  const auto& lo = std::min(a, b);
  const auto& hi = std::max(a, b);
  return lo + bond_symbol(order) + hi;
}

BondVocabulary build_bond_vocabulary(std::span<const MoleculeGraph> graphs) {
  if (graphs.empty()) throw Error("build_bond_vocabulary: no molecules");
  std::set<std::string> keys;
  for (const auto& g : graphs) {
    for (const auto& b : g.bonds) keys.insert(bond_key(g.atoms[b.i].element, g.atoms[b.j].element, b.order));
  }
  return {{keys.begin(), keys.end()}};
}

FeatureTable sum_over_bonds(std::span<const MoleculeGraph> graphs, const BondVocabulary& vocab,
                            const std::string& name) {
  std::unordered_map<std::string, Index> row;
  for (std::size_t i = 0; i < vocab.keys.size(); ++i) row.emplace(vocab.keys[i], static_cast<Index>(i));

  FeatureTable t;
  t.name = name;
  t.features = vocab.keys;
  t.data = Matrix::Zero(static_cast<Index>(vocab.keys.size()), static_cast<Index>(graphs.size()));
  for (std::size_t n = 0; n < graphs.size(); ++n) {
    const auto& g = graphs[n];
    t.molecule_ids.push_back(g.id);
    for (const auto& b : g.bonds) {
      const auto key = bond_key(g.atoms[b.i].element, g.atoms[b.j].element, b.order);
      const auto it = row.find(key);
      if (it == row.end()) {
        throw Error("sum_over_bonds: molecule " + g.id + " has out-of-vocabulary bond " + key);
      }
      t.data(it->second, static_cast<Index>(n)) += 1.0;
    }
  }
  return t;
}

Matrix weight_matrix(const MoleculeGraph& g) {
  const auto n = static_cast<Index>(g.atoms.size());
  Matrix w = Matrix::Zero(n, n);
  for (const auto& b : g.bonds) {
    const double v = bond_order_value(b.order);
    w(b.i, b.j) = v;
    w(b.j, b.i) = v;
  }
  return w;
}

Matrix coulomb_matrix(const Geometry& geometry) {
  const auto n = static_cast<Index>(geometry.atoms.size());
  Matrix c(n, n);
  for (Index i = 0; i < n; ++i) {
    const double zi = geometry.atoms[i].z;
    c(i, i) = 0.5 * std::pow(zi, 2.4);
    for (Index j = 0; j < i; ++j) {
      const double r =
          (geometry.atoms[i].position - geometry.atoms[j].position).norm() * kBohrPerAngstrom;
      if (!(r > 0.0)) throw Error("coulomb_matrix: coincident atoms in molecule " + geometry.id);
      c(i, j) = c(j, i) = zi * geometry.atoms[j].z / r;
    }
  }
  return c;
}

namespace {

Vector padded_spectrum(const Matrix& m, Index dmax, const std::string& what, const std::string& id) {
  if (m.rows() > dmax) {
    throw Error(what + ": molecule " + id + " has " + std::to_string(m.rows()) + " atoms, more than dmax=" +
                std::to_string(dmax));
  }
  Vector out = Vector::Zero(dmax);
  if (m.rows() > 0) out.head(m.rows()) = linalg::symmetric_eigenvalues(m);
  return out;
}

std::vector<std::string> eigen_labels(const std::string& prefix, Index dmax) {
  std::vector<std::string> labels;
  for (Index i = 0; i < dmax; ++i) labels.push_back(prefix + "_" + std::to_string(i + 1));
  return labels;
}

}  // namespace

Vector weight_eigenspectrum(const MoleculeGraph& g, Index dmax) {
  return padded_spectrum(weight_matrix(g), dmax, "weight_eigenspectrum", g.id);
}

Vector coulomb_eigenspectrum(const Geometry& geometry, Index dmax) {
  return padded_spectrum(coulomb_matrix(geometry), dmax, "coulomb_eigenspectrum", geometry.id);
}

Index max_atom_count(std::span<const MoleculeGraph> graphs) {
  Index m = 0;
  for (const auto& g : graphs) m = std::max(m, static_cast<Index>(g.atoms.size()));
  return m;
}

Index max_atom_count(const GeometrySet& set) {
  Index m = 0;
  for (const auto& g : set.molecules) m = std::max(m, static_cast<Index>(g.atoms.size()));
  return m;
}

FeatureTable weight_eigenspectra(std::span<const MoleculeGraph> graphs, Index dmax, const std::string& name) {
  FeatureTable t;
  t.name = name;
  t.features = eigen_labels(name, dmax);
  t.data.resize(dmax, static_cast<Index>(graphs.size()));
  for (const auto& g : graphs) t.molecule_ids.push_back(g.id);
  const auto n = static_cast<long>(graphs.size());
  for (long i = 0; i < n; ++i) {
    if (static_cast<Index>(graphs[i].atoms.size()) > dmax) {
      throw Error("weight_eigenspectra: molecule " + graphs[i].id + " exceeds dmax");
    }
  }
  parallel_for(n, [&](long i) { t.data.col(i) = weight_eigenspectrum(graphs[i], dmax); });
  return t;
}

FeatureTable coulomb_eigenspectra(const GeometrySet& set, Index dmax, const std::string& name) {
  FeatureTable t;
  t.name = name;
  t.features = eigen_labels(name, dmax);
  t.data.resize(dmax, static_cast<Index>(set.molecules.size()));
  for (const auto& g : set.molecules) {
    if (static_cast<Index>(g.atoms.size()) > dmax) throw Error("coulomb_eigenspectra: molecule " + g.id + " exceeds dmax");
    t.molecule_ids.push_back(g.id);
  }
  const auto n = static_cast<long>(set.molecules.size());
  parallel_for(n, [&](long i) { t.data.col(i) = coulomb_eigenspectrum(set.molecules[i], dmax); });
  return t;
}

}  // namespace ivafuse::featurize
