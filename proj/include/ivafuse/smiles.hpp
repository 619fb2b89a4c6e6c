#pragma once

#include "ivafuse/types.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ivafuse {

enum class BondOrder { Single, Aromatic, Double, Triple };

/// 1, 1.5, 2 or 3.
double bond_order_value(BondOrder order);
/// SMILES bond symbol: '-', ':', '=' or '#'.
char bond_symbol(BondOrder order);

struct GraphAtom {
  std::string element;  // capitalized symbol, e.g. "C", "Cl"
  bool aromatic = false;
  int charge = 0;
  std::optional<int> explicit_h;  // bracket H-count; nullopt = implicit
  // Filled by hydrogen materialization (heavy atoms only; 0 for added H).
  int hydrogens_added = 0;
  int valence = 0;
};

struct Bond {
  int i = 0;
  int j = 0;
  BondOrder order = BondOrder::Single;
};

struct MoleculeGraph {
  std::string id;
  std::vector<GraphAtom> atoms;
  std::vector<Bond> bonds;
};

/// Parses a SMILES string and materializes every hydrogen as an explicit
/// atom. Heavy atoms keep SMILES token order; hydrogens follow, grouped by
/// the heavy atom they attach to. Throws ParseError with offset() set to the
/// character position of the problem.
///
/// Supported: organic subset (B C N O P S F Cl Br I, aromatic b c n o s p),
/// bracket atoms with isotope, chirality, H-count, charge and atom class,
/// bonds - = # : / \, branches, ring closures (digits and %nn), and '.'.
/// Stereo markers are accepted and discarded.
MoleculeGraph parse_smiles(std::string_view smiles, std::string id = {});

int heavy_atom_count(const MoleculeGraph& g);

/// Sum of bond orders at `atom`, counting 1.5 for aromatic bonds.
double bond_order_sum(const MoleculeGraph& g, int atom);

/// Integer (Kekule-equivalent) bond-order sum used for valence filling:
/// aromatic bonds count 1, plus one pi bond for an aromatic atom unless that
/// would exceed its lowest valence (lone-pair donors such as furan oxygen).
int valence_sum(const MoleculeGraph& g, int atom);

}  // namespace ivafuse
