#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace coauthornet {

struct GradcheckOptions {
  std::uint64_t seed = 1;
  double step = 1e-5;
  double tolerance = 1e-4;
  // Scales every analytic gradient by 2 so the check must fail.
  bool inject_wrong_gradient = false;
};

struct GradcheckRow {
  std::string family;  // skipgram, attri2vec, sage-mean, sage-maxpool, link-<variant>
  std::string block;
  double max_rel_error = 0.0;
};

// Central differences against the analytic gradients of every trainable
// objective, on tiny fixed graphs (<= 8 nodes, dims <= 8) with frozen
// neighbor samples and negatives.
std::vector<GradcheckRow> run_gradcheck(const GradcheckOptions& options = {});

bool gradcheck_passed(const std::vector<GradcheckRow>& rows, double tolerance);

}  // namespace coauthornet
