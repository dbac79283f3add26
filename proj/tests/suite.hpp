#pragma once

// Regression suite: small structures chosen to exercise walls, holes, towers,
// dead ends and several entrances, plus a seeded sample of random ones.

#include "brickctl/structure.hpp"
#include "test_data.hpp"

#include <random>
#include <string>
#include <vector>

struct SuiteEntry {
  std::string name;
  brickctl::StructureSpec spec;
};

inline std::vector<SuiteEntry> regression_suite(std::size_t random_extra = 16) {
  using brickctl::StructureSpec;
  std::vector<SuiteEntry> s{
      {"single", brickctl::parse_structure(test_data("single.txt"))},
      {"trap", brickctl::parse_structure(test_data("trap.txt"))},
      {"scenario5", brickctl::parse_structure(test_data("scenario5.txt"))},
      {"row-111", StructureSpec(3, 1, {1, 1, 1}, {{1, 1}})},
      {"row-120", StructureSpec(3, 1, {1, 2, 0}, {{1, 1}})},
      {"pair-10", StructureSpec(2, 1, {1, 0}, {{1, 1}})},
      {"column-212", StructureSpec(1, 3, {2, 1, 2}, {{1, 2}})},
      {"square-1", StructureSpec(2, 2, {1, 1, 1, 1}, {{1, 1}})},
      {"corner-1110", StructureSpec(2, 2, {1, 1, 1, 0}, {{1, 1}, {2, 1}})},
      {"steps-3x2", StructureSpec(3, 2, {1, 2, 1, 0, 1, 2}, {{1, 1}, {3, 1}})},
      {"ring-3x3", StructureSpec(3, 3, {1, 1, 1, 1, 0, 1, 1, 1, 1}, {{1, 1}})},
      {"bump-3x3", StructureSpec(3, 3, {1, 1, 1, 1, 2, 1, 1, 1, 1}, {{1, 1}})},
      {"mixed-a", StructureSpec(3, 3, {1, 0, 2, 2, 1, 2, 0, 2, 0}, {{1, 1}, {3, 3}})},
      {"mixed-b", StructureSpec(3, 3, {1, 2, 0, 1, 2, 0, 1, 1, 2}, {{1, 1}, {3, 3}})},
      {"mixed-c", StructureSpec(3, 3, {2, 2, 0, 0, 2, 1, 2, 2, 1}, {{1, 1}, {3, 3}})},
      {"isolated", StructureSpec(3, 3, {0, 0, 0, 0, 2, 0, 0, 0, 0}, {{1, 1}})},
      {"all-2", StructureSpec(3, 3, {2, 2, 2, 2, 2, 2, 2, 2, 2}, {{1, 1}})},
  };
  std::mt19937_64 rng(20);
  for (std::size_t k = 0; k < random_extra; ++k) {
    const int w = 1 + static_cast<int>(rng() % 3), h = 1 + static_cast<int>(rng() % 3);
    std::vector<int> t(static_cast<std::size_t>(w * h));
    for (auto& v : t)
      v = static_cast<int>(rng() % 3);
    std::vector<brickctl::Cell> io{{1, 1}};
    if (rng() % 2)
      io.push_back({w, h});
    s.push_back({"random-" + std::to_string(k), StructureSpec(w, h, t, io)});
  }
  return s;
}
