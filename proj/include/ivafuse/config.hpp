#pragma once

#include "ivafuse/fusion.hpp"
#include "ivafuse/iva.hpp"
#include "ivafuse/regress.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace ivafuse {

struct TableRef {
  std::string name;
  std::filesystem::path path;
};

struct BenchConfig {
  Index K = 3;
  Index P = 5;
  Index N = 5000;
  double rho = 0.5;
  double cond_bound = 10.0;
  int seeds = 50;
  std::vector<std::string> modes{"iva", "ica"};
  bool independent_slices = false;
};

/// Everything a command needs. Loaded from a flat INI file; paths are
/// resolved against the config file's directory.
struct RunConfig {
  std::filesystem::path source;  // config file, empty if built in code
  std::uint64_t seed = 0;
  std::filesystem::path out = "out";
  int jobs = 0;

  std::vector<TableRef> tables;
  std::filesystem::path smiles;
  std::filesystem::path xyz;
  std::filesystem::path labels;
  std::string property;
  Index subsample = 0;  // 0 = use every molecule
  Index dmax = 0;       // 0 = largest molecule

  fusion::Spec fusion;
  regress::CvConfig cv = regress::CvConfig::defaults();

  std::vector<Index> curve_sizes;
  int sweep_k = 2;
  BenchConfig bench;

  /// Canonical INI text of the effective configuration (absolute paths).
  std::string snapshot() const;
  /// FNV-1a 64 of snapshot(), as 16 hex digits.
  std::string hash() const;
};

RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});

}  // namespace ivafuse
