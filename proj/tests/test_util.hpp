#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "dtr/concrete.hpp"

namespace dtr::test {

inline std::string readSample(const std::string& name) {
  std::ifstream in(std::string(DTR_SAMPLES) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Module sample(const std::string& name) {
  return parseModule(readSample(name));
}

}  // namespace dtr::test
