#pragma once

#include <vector>

#include "tactile/acquire.hpp"

namespace tactile {

// Slope of the change in pixel-intensity sum versus the change in applied
// force, both taken relative to the lowest-force in-window frame. The fit is
// least squares through the origin.
struct DeformationIndex {
    double di = 0.0;              // counts per newton
    double residual_rms = 0.0;
    int point_count = 0;
    std::size_t reference_index = 0;
};

DeformationIndex estimate_di(const FrameSequence& seq, double min_force_span_n = 0.5);

struct RiskWeights {
    double w_size = 0.5;
    double w_di = 0.5;
    double d_max_mm = 25.0;
    double di_max = 8.0e5;        // counts per newton, reduced-profile scale

    void validate() const;
};

// w_size * D / D_max - w_di * DI / DI_max, clamped to [0, 1].
double risk_score(double diameter_mm, double di, const RiskWeights& weights);

// hard.di / soft.di; throws DivisionByZeroDI on a zero denominator.
double di_ratio(const DeformationIndex& hard, const DeformationIndex& soft);

} // namespace tactile
