#include "tactile/size_surface.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "tactile/errors.hpp"

namespace tactile {

namespace {

void basis_row(double f, double i, double* row) {
    row[0] = 1.0;
    row[1] = f;
    row[2] = f * f;
    row[3] = i;
    row[4] = f * i;
    row[5] = f * f * i;
}

// Solve the 6x6 normal equations with partially pivoted Gaussian
// elimination. Throws RankDeficient when a pivot collapses.
std::array<double, 6> solve_normal(std::array<std::array<double, 7>, 6>& aug) {
    constexpr int n = 6;
    double scale = 0.0;
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) scale = std::max(scale, std::abs(aug[r][c]));
    if (scale == 0.0) throw RankDeficient("empty design matrix");

    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(aug[r][col]) > std::abs(aug[pivot][col])) pivot = r;
        if (std::abs(aug[pivot][col]) < 1e-10 * scale)
            throw RankDeficient("design matrix rank < 6; calibration samples span too little");
        std::swap(aug[col], aug[pivot]);
        for (int r = col + 1; r < n; ++r) {
            double factor = aug[r][col] / aug[col][col];
            for (int c = col; c <= n; ++c) aug[r][c] -= factor * aug[col][c];
        }
    }
    std::array<double, 6> x{};
    for (int r = n - 1; r >= 0; --r) {
        double s = aug[r][n];
        for (int c = r + 1; c < n; ++c) s -= aug[r][c] * x[c];
        x[r] = s / aug[r][r];
    }
    return x;
}

double median_of(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

} // namespace

CalibrationSurface fit_size_surface(const std::vector<CalibrationSample>& samples) {
    if (samples.size() < CalibrationSurface::kCoefficients)
        throw RankDeficient("need at least 6 samples, got " + std::to_string(samples.size()));

    CalibrationSurface surface;
    double fm = 0.0, im = 0.0;
    for (const auto& s : samples) {
        fm += s.force_n;
        im += s.pixel_sum;
    }
    fm /= samples.size();
    im /= samples.size();
    double fv = 0.0, iv = 0.0;
    for (const auto& s : samples) {
        fv += (s.force_n - fm) * (s.force_n - fm);
        iv += (s.pixel_sum - im) * (s.pixel_sum - im);
    }
    double fs = std::sqrt(fv / samples.size());
    double is = std::sqrt(iv / samples.size());
    if (fs <= 0.0) throw RankDeficient("all samples share one force value");
    if (is <= 0.0) throw RankDeficient("all samples share one pixel-sum value");
    surface.f_mean_ = fm;
    surface.f_scale_ = fs;
    surface.i_mean_ = im;
    surface.i_scale_ = is;

    std::array<std::array<double, 7>, 6> aug{};
    double row[6];
    for (const auto& s : samples) {
        basis_row((s.force_n - fm) / fs, (s.pixel_sum - im) / is, row);
        for (int r = 0; r < 6; ++r) {
            for (int c = 0; c < 6; ++c) aug[r][c] += row[r] * row[c];
            aug[r][6] += row[r] * s.true_diameter_mm;
        }
    }
    surface.coef_ = solve_normal(aug);
    return surface;
}

double CalibrationSurface::evaluate(double force_n, double pixel_sum) const {
    double row[6];
    basis_row((force_n - f_mean_) / f_scale_, (pixel_sum - i_mean_) / i_scale_, row);
    double d = 0.0;
    for (int k = 0; k < 6; ++k) d += coef_[k] * row[k];
    return d;
}

std::array<std::array<double, 2>, 3> CalibrationSurface::raw_coefficients() const {
    // f = a1 F + a0, i = c1 I + c0; expand the standardized polynomial into
    // the raw monomials F^i I^j.
    double a1 = 1.0 / f_scale_, a0 = -f_mean_ / f_scale_;
    double c1 = 1.0 / i_scale_, c0 = -i_mean_ / i_scale_;
    const auto& c = coef_;
    std::array<std::array<double, 2>, 3> p{};
    p[0][0] = c[0] + c[1] * a0 + c[2] * a0 * a0 + c[3] * c0 + c[4] * a0 * c0 + c[5] * a0 * a0 * c0;
    p[1][0] = c[1] * a1 + 2.0 * c[2] * a1 * a0 + c[4] * a1 * c0 + 2.0 * c[5] * a1 * a0 * c0;
    p[2][0] = c[2] * a1 * a1 + c[5] * a1 * a1 * c0;
    p[0][1] = c[3] * c1 + c[4] * a0 * c1 + c[5] * a0 * a0 * c1;
    p[1][1] = c[4] * a1 * c1 + 2.0 * c[5] * a1 * a0 * c1;
    p[2][1] = c[5] * a1 * a1 * c1;
    return p;
}

void CalibrationSurface::save(const std::filesystem::path& path) const {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["type"] = "size_surface";
    j["scaled_coefficients"] = coef_;
    j["force_mean"] = f_mean_;
    j["force_scale"] = f_scale_;
    j["intensity_mean"] = i_mean_;
    j["intensity_scale"] = i_scale_;
    auto raw = raw_coefficients();
    j["raw_coefficients"] = {{raw[0][0], raw[0][1]}, {raw[1][0], raw[1][1]}, {raw[2][0], raw[2][1]}};
    std::ofstream out(path);
    if (!out) throw ArtifactError("cannot open " + path.string() + " for writing");
    out << j.dump(2) << "\n";
}

CalibrationSurface CalibrationSurface::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ArtifactError("cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ArtifactError(path.string() + ": " + e.what());
    }
    if (j.value("type", "") != "size_surface")
        throw ArtifactError(path.string() + ": not a size-surface file");
    CalibrationSurface s;
    auto coef = j.at("scaled_coefficients").get<std::vector<double>>();
    if (coef.size() != kCoefficients) throw ArtifactError(path.string() + ": bad coefficient count");
    std::copy(coef.begin(), coef.end(), s.coef_.begin());
    s.f_mean_ = j.at("force_mean").get<double>();
    s.f_scale_ = j.at("force_scale").get<double>();
    s.i_mean_ = j.at("intensity_mean").get<double>();
    s.i_scale_ = j.at("intensity_scale").get<double>();
    return s;
}

SizeEstimate estimate_size(const FrameSequence& seq, const CalibrationSurface& surface) {
    SizeEstimate est;
    for (const auto& frame : seq.frames) {
        if (frame.applied_force_n < seq.window_lo_n || frame.applied_force_n > seq.window_hi_n)
            continue;
        est.per_frame_mm.push_back(surface.evaluate(frame.applied_force_n, frame.pixel_sum()));
    }
    if (est.per_frame_mm.empty())
        throw EmptyWindow("no frame inside [" + std::to_string(seq.window_lo_n) + ", " +
                          std::to_string(seq.window_hi_n) + "] N");
    est.diameter_mm = median_of(est.per_frame_mm);
    est.positive = est.diameter_mm > 0.0;
    return est;
}

double size_error_percent(double true_mm, double estimated_mm) {
    if (true_mm <= 0.0) throw ConfigError("true size must be positive");
    return 100.0 * std::abs(estimated_mm - true_mm) / true_mm;
}

} // namespace tactile
