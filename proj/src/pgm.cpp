#include "magbend/pgm.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "magbend/errors.hpp"
#include "magbend/spec_io.hpp"

namespace magbend {

namespace {

// Next whitespace-delimited token, skipping '#' comments to end of line.
std::string next_token(const std::string& bytes, size_t& at) {
    while (at < bytes.size()) {
        if (std::isspace(static_cast<unsigned char>(bytes[at]))) {
            ++at;
        } else if (bytes[at] == '#') {
            while (at < bytes.size() && bytes[at] != '\n') ++at;
        } else {
            break;
        }
    }
    const size_t start = at;
    while (at < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[at]))) ++at;
    return bytes.substr(start, at - start);
}

struct Run {
    int start = 0;
    int length = 0;
    double mean() const { return start + (length - 1) / 2.0; }
};

}  // namespace

GrayImage parse_pgm(const std::string& bytes) {
    size_t at = 0;
    if (next_token(bytes, at) != "P5")
        throw io_error("PGM: not a binary P5 file");
    GrayImage img;
    int maxval = 0;
    try {
        img.width = std::stoi(next_token(bytes, at));
        img.height = std::stoi(next_token(bytes, at));
        maxval = std::stoi(next_token(bytes, at));
    } catch (const std::exception&) {
        throw io_error("PGM: malformed header");
    }
    if (img.width <= 0 || img.height <= 0)
        throw io_error("PGM: non-positive dimensions");
    if (maxval <= 0 || maxval > 255)
        throw io_error("PGM: only 8-bit maxval (<= 255) is supported");
    ++at;  // single whitespace byte after maxval
    const size_t need = static_cast<size_t>(img.width) * img.height;
    if (bytes.size() < at + need)
        throw io_error("PGM: pixel data truncated");
    img.pixels.assign(bytes.begin() + static_cast<long>(at),
                      bytes.begin() + static_cast<long>(at + need));
    return img;
}

GrayImage read_pgm(const std::string& path) {
    return parse_pgm(read_text_file(path));
}

std::string write_pgm(const GrayImage& img) {
    if (img.width <= 0 || img.height <= 0 ||
        img.pixels.size() != static_cast<size_t>(img.width) * img.height)
        throw std::invalid_argument("write_pgm: inconsistent image");
    std::string out = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) +
                      "\n255\n";
    out.append(img.pixels.begin(), img.pixels.end());
    return out;
}

Curve2D extract_centerline(const GrayImage& img, int threshold, ScanAxis axis) {
    if (threshold < 0 || threshold > 255)
        throw std::invalid_argument("extract_centerline: threshold must be in [0, 255]");
    if (!(img.mm_per_pixel > 0.0))
        throw std::invalid_argument("extract_centerline: mm_per_pixel must be > 0");
    if (img.pixels.size() != static_cast<size_t>(img.width) * img.height)
        throw std::invalid_argument("extract_centerline: inconsistent image buffer");

    const int n_lines = axis == ScanAxis::x ? img.width : img.height;
    const int n_cross = axis == ScanAxis::x ? img.height : img.width;

    std::vector<std::pair<int, double>> line_means;  // (line index, mean cross index)
    std::vector<int> ambiguous;
    for (int line = 0; line < n_lines; ++line) {
        std::vector<Run> runs;
        for (int c = 0; c < n_cross; ++c) {
            const std::uint8_t v =
                axis == ScanAxis::x ? img.at(c, line) : img.at(line, c);
            if (v < threshold) {
                if (!runs.empty() && runs.back().start + runs.back().length == c)
                    ++runs.back().length;
                else
                    runs.push_back(Run{c, 1});
            }
        }
        if (runs.empty()) continue;
        if (runs.size() > 1) ambiguous.push_back(line);
        const Run* best = &runs[0];
        for (const Run& r : runs)
            if (r.length > best->length) best = &r;
        line_means.emplace_back(line, best->mean());
    }

    if (line_means.empty())
        throw extraction_error("extract_centerline: no continuum pixels below threshold");
    if (ambiguous.size() * 5 > line_means.size()) {
        std::ostringstream msg;
        msg << "extract_centerline: " << ambiguous.size() << " of " << line_means.size()
            << " occupied scan lines contain disjoint runs (lines";
        for (size_t i = 0; i < ambiguous.size() && i < 12; ++i) msg << ' ' << ambiguous[i];
        if (ambiguous.size() > 12) msg << " ...";
        msg << ")";
        throw extraction_error(msg.str());
    }

    Curve2D curve;
    curve.source = CurveSource::image;
    const double scale = img.mm_per_pixel * 1e-3;  // to meters
    curve.points.reserve(line_means.size());
    for (const auto& [line, mean] : line_means) {
        if (axis == ScanAxis::x)
            // Columns left to right; rows flipped so y grows upward.
            curve.points.push_back(Vec2{line * scale, (img.height - 1 - mean) * scale});
        else
            // Rows top to bottom as the independent coordinate.
            curve.points.push_back(Vec2{line * scale, mean * scale});
    }
    return root_align(curve);
}

}  // namespace magbend
