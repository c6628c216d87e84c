#include "mlb/metrics.hpp"

#include <cmath>
#include <limits>

#include "mlb/error.hpp"

namespace mlb {

VarMetrics compute_metrics(const std::vector<double>& pred,
                           const std::vector<double>& truth) {
    if (pred.size() != truth.size())
        throw LengthMismatch("compute_metrics: series lengths differ");
    if (truth.size() < 2)
        throw EmptyInput("compute_metrics: need at least 2 points");

    const double n = static_cast<double>(truth.size());
    VarMetrics m;
    double ss_res = 0.0;
    double abs_sum = 0.0;
    double ape_sum = 0.0;   // sum |(y - yhat)/y|
    double spe_sum = 0.0;   // sum ((y - yhat)/y)^2
    double truth_sum = 0.0;
    bool zero_truth = false;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        double d = truth[i] - pred[i];
        ss_res += d * d;
        abs_sum += std::abs(d);
        m.max_err = std::max(m.max_err, std::abs(d));
        truth_sum += truth[i];
        if (truth[i] == 0.0) {
            zero_truth = true;
        } else {
            double r = d / truth[i];
            ape_sum += std::abs(r);
            spe_sum += r * r;
        }
    }
    m.mse = ss_res / n;
    m.rmse = std::sqrt(m.mse);
    m.mae = abs_sum / n;
    if (zero_truth) {
        m.mape_percent = std::numeric_limits<double>::infinity();
        m.rmspe = std::numeric_limits<double>::infinity();
    } else {
        m.mape_percent = 100.0 / n * ape_sum;
        m.rmspe = std::sqrt(spe_sum / n);
    }

    double mean = truth_sum / n;
    double ss_tot = 0.0;
    for (double y : truth)
        ss_tot += (y - mean) * (y - mean);
    if (ss_tot == 0.0) {
        m.r2_defined = false;
        m.r2 = std::numeric_limits<double>::quiet_NaN();
    } else {
        m.r2 = 1.0 - ss_res / ss_tot;
    }
    return m;
}

MetricsReport make_report(const std::vector<double>& pred_v,
                          const std::vector<double>& truth_v,
                          const std::vector<double>& pred_n,
                          const std::vector<double>& truth_n) {
    MetricsReport rep;
    rep.v = compute_metrics(pred_v, truth_v);
    rep.n = compute_metrics(pred_n, truth_n);
    rep.total_mse = rep.v.mse + rep.n.mse;
    rep.n_points = truth_v.size();
    return rep;
}

} // namespace mlb
