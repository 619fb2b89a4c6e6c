#pragma once

#include "ivafuse/types.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ivafuse {

/// Named d x N feature matrix; column n belongs to molecule_ids[n].
struct FeatureTable {
  std::string name;
  std::vector<std::string> features;
  Matrix data;
  std::vector<std::string> molecule_ids;

  Index dim() const { return data.rows(); }
  Index size() const { return data.cols(); }
};

struct Atom {
  std::string symbol;
  int z = 0;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();  // Angstrom
};

struct Geometry {
  std::string id;
  std::vector<Atom> atoms;
};

struct GeometrySet {
  std::vector<Geometry> molecules;
};

struct LabelVector {
  std::string property_name;
  std::string units;
  Vector values;
  std::vector<std::string> molecule_ids;
};

struct SmilesRecord {
  std::string id;
  std::string smiles;
};

namespace dataio {

/// Atomic number for H, B, C, N, O, F, P, S, Cl, Br, I; nullopt otherwise.
std::optional<int> atomic_number(std::string_view symbol);

/// Shortest text that parses back to exactly the same double (17 sig. digits).
std::string format_double(double v);

/// Checks the FeatureTable invariants; throws Error naming the violation.
void validate(const FeatureTable& table);

FeatureTable load_feature_table(const std::filesystem::path& path, const std::string& name);
void write_feature_table(const std::filesystem::path& path, const FeatureTable& table);

GeometrySet load_xyz_set(const std::filesystem::path& path);

/// Column names (excluding "id") of a label CSV.
std::vector<std::string> label_columns(const std::filesystem::path& path);
LabelVector load_labels(const std::filesystem::path& path, const std::string& property);

/// One SMILES per line, optionally followed by a tab and an identifier.
/// Blank lines and lines starting with '#' are skipped; missing ids become
/// "mol<line>".
std::vector<SmilesRecord> load_smiles_file(const std::filesystem::path& path);

/// Reorders every table to the molecule order of the first. Differing id sets
/// are an error; no silent join is performed.
std::vector<FeatureTable> align_tables(std::vector<FeatureTable> tables);

/// Reorders labels to `ids`; throws if the id sets differ.
LabelVector align_labels(const LabelVector& labels, const std::vector<std::string>& ids);

/// Restrict a table to the given columns, in the given order.
FeatureTable select_columns(const FeatureTable& table, const std::vector<Index>& columns);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace dataio
}  // namespace ivafuse
