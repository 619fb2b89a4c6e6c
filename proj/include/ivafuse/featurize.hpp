#pragma once

#include "ivafuse/dataio.hpp"
#include "ivafuse/smiles.hpp"
#include "ivafuse/types.hpp"

#include <span>
#include <string>
#include <vector>

namespace ivafuse::featurize {

/// Angstrom to Bohr.
inline constexpr double kBohrPerAngstrom = 1.8897259886;

/// Sorted, unique bond-type keys such as "C-H", "C#N", "C:C".
struct BondVocabulary {
  std::vector<std::string> keys;
};

/// "<A><sym><B>" with A <= B alphabetically.
std::string bond_key(const std::string& a, const std::string& b, BondOrder order);

BondVocabulary build_bond_vocabulary(std::span<const MoleculeGraph> graphs);

/// Bond counts per vocabulary key; one column per graph.
FeatureTable sum_over_bonds(std::span<const MoleculeGraph> graphs, const BondVocabulary& vocab,
                            const std::string& name = "SOB");

/// Symmetric atom x atom bond-order matrix (hydrogens included).
Matrix weight_matrix(const MoleculeGraph& g);

/// Coulomb matrix in atomic units: 0.5 Z^2.4 on the diagonal, Z_i Z_j / r_ij
/// off it, with r in Bohr.
Matrix coulomb_matrix(const Geometry& geometry);

/// Eigenvalues of the weight matrix, descending, zero-padded to dmax.
Vector weight_eigenspectrum(const MoleculeGraph& g, Index dmax);

/// Eigenvalues of the Coulomb matrix, descending, zero-padded to dmax.
Vector coulomb_eigenspectrum(const Geometry& geometry, Index dmax);

/// Largest atom count (hydrogens included).
Index max_atom_count(std::span<const MoleculeGraph> graphs);
Index max_atom_count(const GeometrySet& set);

/// Batch versions; each molecule is an independent OpenMP work item.
FeatureTable weight_eigenspectra(std::span<const MoleculeGraph> graphs, Index dmax,
                                 const std::string& name = "WE");
FeatureTable coulomb_eigenspectra(const GeometrySet& set, Index dmax, const std::string& name = "CME");

}  // namespace ivafuse::featurize
