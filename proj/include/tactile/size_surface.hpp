#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include "tactile/acquire.hpp"

namespace tactile {

struct CalibrationSample {
    double force_n = 0.0;
    double pixel_sum = 0.0;
    double true_diameter_mm = 0.0;
};

// Polynomial size surface D(F, I) = sum_{i<=2, j<=1} p_ij F^i I^j, fit by
// ordinary least squares on standardized inputs. Coefficients are stored in
// the standardized basis together with the scaling, and can be expanded back
// to the raw monomial basis.
class CalibrationSurface {
public:
    static constexpr int kForceOrder = 2;        // n
    static constexpr int kIntensityOrder = 1;    // m
    static constexpr int kCoefficients = (kForceOrder + 1) * (kIntensityOrder + 1);

    double evaluate(double force_n, double pixel_sum) const;

    // Coefficients p_ij of the raw (unstandardized) monomials F^i I^j,
    // indexed [i][j].
    std::array<std::array<double, kIntensityOrder + 1>, kForceOrder + 1> raw_coefficients() const;

    const std::array<double, kCoefficients>& scaled_coefficients() const { return coef_; }
    double force_mean() const { return f_mean_; }
    double force_scale() const { return f_scale_; }
    double intensity_mean() const { return i_mean_; }
    double intensity_scale() const { return i_scale_; }

    void save(const std::filesystem::path& path) const;
    static CalibrationSurface load(const std::filesystem::path& path);

    friend CalibrationSurface fit_size_surface(const std::vector<CalibrationSample>& samples);

private:
    // Basis order: 1, f, f^2, i, f i, f^2 i (standardized f and i).
    std::array<double, kCoefficients> coef_{};
    double f_mean_ = 0.0, f_scale_ = 1.0;
    double i_mean_ = 0.0, i_scale_ = 1.0;
};

// Throws RankDeficient when fewer than kCoefficients samples are given or
// the design matrix loses rank (e.g. a single force or intensity level).
CalibrationSurface fit_size_surface(const std::vector<CalibrationSample>& samples);

struct SizeEstimate {
    double diameter_mm = 0.0;
    bool positive = true;                  // flags nonphysical estimates
    std::vector<double> per_frame_mm;
    const char* aggregation = "median";
};

// Evaluate the surface on every in-window frame and aggregate by median.
// Throws EmptyWindow-like ConfigError when no frame qualifies.
SizeEstimate estimate_size(const FrameSequence& seq, const CalibrationSurface& surface);

// 100 * |estimated - true| / true.
double size_error_percent(double true_mm, double estimated_mm);

} // namespace tactile
