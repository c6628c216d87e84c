#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace mlb {

// The seven regression statistics for one state variable, in physical units.
// mape_percent carries the x100 factor; rmspe is the raw ratio (the printed
// formula has no percent factor).  Both are +inf when any truth value is
// exactly 0 (raw-formula semantics, no epsilon guard).  r2_defined is false
// when the truth series is constant (R^2 undefined); r2 is then NaN and must
// not be consumed as a number.
struct VarMetrics {
    double mse = 0.0;
    double rmse = 0.0;
    double mae = 0.0;
    double mape_percent = 0.0;
    double rmspe = 0.0;
    double r2 = 0.0;
    bool r2_defined = true;
    double max_err = 0.0;
};

VarMetrics compute_metrics(const std::vector<double>& pred,
                           const std::vector<double>& truth);

// Per-variable metrics plus run metadata; one report row per experiment.
struct MetricsReport {
    VarMetrics v;
    VarMetrics n;
    double total_mse = 0.0; // mse_V + mse_N exactly
    std::size_t n_points = 0;
    double wall_time_s = 0.0;
    long epochs = 0;
    std::string method;
    std::string regime;
};

MetricsReport make_report(const std::vector<double>& pred_v,
                          const std::vector<double>& truth_v,
                          const std::vector<double>& pred_n,
                          const std::vector<double>& truth_n);

} // namespace mlb
