#include "tactile/frame_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "tactile/errors.hpp"

namespace tactile {

void write_pgm(const std::filesystem::path& path, const TactileFrame& frame) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ArtifactError("cannot open " + path.string() + " for writing");
    out << "P5\n" << frame.width << " " << frame.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(frame.pixels.data()),
              static_cast<std::streamsize>(frame.pixels.size()));
    if (!out) throw ArtifactError("short write to " + path.string());
}

TactileFrame read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArtifactError("cannot open " + path.string());
    std::string magic;
    int w = 0, h = 0, maxval = 0;
    in >> magic >> w >> h >> maxval;
    if (magic != "P5" || w <= 0 || h <= 0 || maxval != 255)
        throw ArtifactError(path.string() + ": not an 8-bit P5 PGM");
    in.get();   // single whitespace after maxval
    TactileFrame frame;
    frame.width = w;
    frame.height = h;
    frame.pixels.resize(static_cast<std::size_t>(w) * h);
    in.read(reinterpret_cast<char*>(frame.pixels.data()),
            static_cast<std::streamsize>(frame.pixels.size()));
    if (in.gcount() != static_cast<std::streamsize>(frame.pixels.size()))
        throw ArtifactError(path.string() + ": truncated pixel data");
    return frame;
}

std::string format_num(double v) {
    if (v == std::floor(v) && std::abs(v) < 1e15) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.1f", v);
        return buf;
    }
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

void write_sequence_csv(const std::filesystem::path& path, const std::vector<FrameRecord>& rows) {
    std::ofstream out(path);
    if (!out) throw ArtifactError("cannot open " + path.string() + " for writing");
    out << "frame_index,force_N,x_mm,y_mm,z_mm,pixel_sum\n";
    for (const auto& r : rows) {
        out << r.frame_index << ',' << format_num(r.force_n) << ',' << format_num(r.pose_mm.x)
            << ',' << format_num(r.pose_mm.y) << ',' << format_num(r.pose_mm.z) << ','
            << format_num(r.pixel_sum) << '\n';
    }
}

std::vector<FrameRecord> read_sequence_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ArtifactError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw ArtifactError(path.string() + ": empty csv");
    std::vector<FrameRecord> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        FrameRecord r;
        char comma;
        ss >> r.frame_index >> comma >> r.force_n >> comma >> r.pose_mm.x >> comma >>
            r.pose_mm.y >> comma >> r.pose_mm.z >> comma >> r.pixel_sum;
        if (ss.fail()) throw ArtifactError(path.string() + ": bad row '" + line + "'");
        rows.push_back(r);
    }
    return rows;
}

} // namespace tactile
