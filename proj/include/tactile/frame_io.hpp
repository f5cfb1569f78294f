#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "tactile/simulator.hpp"

namespace tactile {

// 8-bit binary PGM (P5).
void write_pgm(const std::filesystem::path& path, const TactileFrame& frame);
TactileFrame read_pgm(const std::filesystem::path& path);

// Sequence sidecar: one row per frame,
// frame_index,force_N,x_mm,y_mm,z_mm,pixel_sum
struct FrameRecord {
    std::uint64_t frame_index = 0;
    double force_n = 0.0;
    Vec3 pose_mm;
    double pixel_sum = 0.0;
};

void write_sequence_csv(const std::filesystem::path& path, const std::vector<FrameRecord>& rows);
std::vector<FrameRecord> read_sequence_csv(const std::filesystem::path& path);

// Fixed-precision float formatting shared by every CSV/report writer so that
// reruns with the same seed serialize byte-identically.
std::string format_num(double v);

} // namespace tactile
