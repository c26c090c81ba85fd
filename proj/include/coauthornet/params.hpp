#pragma once

#include <span>
#include <string>
#include <vector>

namespace coauthornet {

// Named view over one learnable parameter block.
struct ParamView {
  std::string name;
  std::span<double> values;
};

struct ConstParamView {
  std::string name;
  std::span<const double> values;
};

}  // namespace coauthornet
