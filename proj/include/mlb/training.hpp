#pragma once

#include <vector>

#include "mlb/mlp.hpp"

namespace mlb {

// One logged training step.  For neural-ODE runs the whole loss is a data
// term, so data mirrors total and physics is 0.
struct LossRecord {
    long epoch;
    double total;
    double data;
    double physics;
};

using LossHistory = std::vector<LossRecord>;

struct TrainResult {
    MlpNet net;
    LossHistory history;
    double wall_time_s = 0.0;
};

} // namespace mlb
