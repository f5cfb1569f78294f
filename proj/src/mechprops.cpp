#include "tactile/mechprops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tactile/errors.hpp"

namespace tactile {

DeformationIndex estimate_di(const FrameSequence& seq, double min_force_span_n) {
    std::vector<double> forces, sums;
    for (const auto& frame : seq.frames) {
        if (frame.applied_force_n < seq.window_lo_n || frame.applied_force_n > seq.window_hi_n)
            continue;
        forces.push_back(frame.applied_force_n);
        sums.push_back(frame.pixel_sum());
    }
    if (forces.size() < 2)
        throw DegenerateForceRange("deformation index needs >= 2 in-window frames, got " +
                                   std::to_string(forces.size()));

    std::size_t ref = 0;
    for (std::size_t i = 1; i < forces.size(); ++i)
        if (forces[i] < forces[ref]) ref = i;

    double span = *std::max_element(forces.begin(), forces.end()) - forces[ref];
    if (span < min_force_span_n)
        throw DegenerateForceRange("force span " + std::to_string(span) +
                                   " N below the noise floor " + std::to_string(min_force_span_n));

    double sxy = 0.0, sxx = 0.0;
    std::vector<double> dfs, dis;
    for (std::size_t i = 0; i < forces.size(); ++i) {
        if (i == ref) continue;
        double df = forces[i] - forces[ref];
        double di = sums[i] - sums[ref];
        dfs.push_back(df);
        dis.push_back(di);
        sxy += df * di;
        sxx += df * df;
    }

    DeformationIndex result;
    result.di = sxy / sxx;
    result.point_count = static_cast<int>(dfs.size());
    result.reference_index = ref;
    double ss = 0.0;
    for (std::size_t i = 0; i < dfs.size(); ++i) {
        double r = dis[i] - result.di * dfs[i];
        ss += r * r;
    }
    result.residual_rms = std::sqrt(ss / dfs.size());
    return result;
}

void RiskWeights::validate() const {
    if (d_max_mm <= 0.0 || di_max <= 0.0)
        throw ConfigError("risk normalizers D_max and DI_max must be positive");
    if (w_size < 0.0 || w_di < 0.0) throw ConfigError("risk weights must be >= 0");
}

double risk_score(double diameter_mm, double di, const RiskWeights& weights) {
    weights.validate();
    double raw = weights.w_size * diameter_mm / weights.d_max_mm -
                 weights.w_di * di / weights.di_max;
    return std::clamp(raw, 0.0, 1.0);
}

double di_ratio(const DeformationIndex& hard, const DeformationIndex& soft) {
    if (soft.di == 0.0) throw DivisionByZeroDI("soft deformation index is zero");
    return hard.di / soft.di;
}

} // namespace tactile
