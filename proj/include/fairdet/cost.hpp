// fairdet -- subgroup fairness evaluation for speaker verification scores
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <algorithm>
#include <string>

#include "fairdet/error.hpp"

namespace fairdet {

// Application-dependent detection cost weighting. The defaults weight a miss
// and a false alarm equally and put the target prior at 5%.
struct CostParams {
  double p_target = 0.05;
  double c_fn = 1.0;
  double c_fp = 1.0;

  void validate() const {
    if (!(p_target > 0.0) || !(p_target < 1.0))
      throw DataError("cost: p_target must lie strictly inside (0, 1), got " +
                      std::to_string(p_target));
    if (!(c_fn >= 0.0))
      throw DataError("cost: c_fn must be nonnegative, got " + std::to_string(c_fn));
    if (!(c_fp >= 0.0))
      throw DataError("cost: c_fp must be nonnegative, got " + std::to_string(c_fp));
    if (!(c_fn + c_fp > 0.0))
      throw DataError("cost: c_fn and c_fp cannot both be zero");
  }

  double fn_weight() const { return c_fn * p_target; }
  double fp_weight() const { return c_fp * (1.0 - p_target); }

  // Normalizer for the conventional "normalized DCF": the cost of the better
  // of the two trivial systems (accept-all / reject-all).
  double normalizer() const { return std::min(fn_weight(), fp_weight()); }

  bool operator==(const CostParams&) const = default;
};

// Weighted detection cost at one operating point.
inline double detection_cost(double fnr, double fpr, const CostParams& p) {
  return p.fn_weight() * fnr + p.fp_weight() * fpr;
}

}  // namespace fairdet
