#pragma once

#include <map>
#include <mutex>
#include <vector>

#include "afl/padic.hpp"

namespace afl {

struct PadicContext::Cache {
  std::mutex mu;
  std::map<long, std::vector<FElem>> norm_one_reps;
};

}  // namespace afl
