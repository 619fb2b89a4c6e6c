#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "ivafuse/types.hpp"

namespace testing_support {

inline std::filesystem::path scratch_dir(const std::string& tag) {
  const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
  auto dir = std::filesystem::temp_directory_path() / "ivafuse_tests" /
             (std::string(info->test_suite_name()) + "." + info->name() + "." + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::filesystem::path write_file(const std::filesystem::path& p, const std::string& text) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream(p) << text;
  return p;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline ivafuse::Matrix random_matrix(ivafuse::Index r, ivafuse::Index c, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  ivafuse::Matrix m(r, c);
  for (ivafuse::Index j = 0; j < c; ++j)
    for (ivafuse::Index i = 0; i < r; ++i) m(i, j) = n(rng);
  return m;
}

inline ivafuse::Matrix random_symmetric(ivafuse::Index n, unsigned seed) {
  const ivafuse::Matrix g = random_matrix(n, n, seed);
  return (g + g.transpose()) / 2.0;
}

}  // namespace testing_support
