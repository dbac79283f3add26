#pragma once

#include <fstream>
#include <sstream>
#include <string>

inline std::string test_data(const std::string& name) {
  std::ifstream in(std::string(BRICKCTL_TEST_DATA) + "/" + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string test_data_path(const std::string& name) {
  return std::string(BRICKCTL_TEST_DATA) + "/" + name;
}
