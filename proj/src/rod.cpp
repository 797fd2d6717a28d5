#include "magbend/rod.hpp"

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>

#include "magbend/errors.hpp"

namespace magbend {

double RodSpec::total_length() const {
    return sections[0].length + sections[1].length + sections[2].length;
}

void RodSpec::validate() const {
    for (const Section& s : sections) {
        if (!std::isfinite(s.length) || s.length <= 0.0)
            throw std::invalid_argument("rod spec '" + name + "': section length must be > 0");
        if (!std::isfinite(s.youngs_modulus) || s.youngs_modulus < 1e6 || s.youngs_modulus > 100e6)
            throw std::invalid_argument("rod spec '" + name +
                                        "': Young's modulus outside the 1-100 MPa sanity band");
    }
    if (sections[0].youngs_modulus < sections[1].youngs_modulus ||
        sections[1].youngs_modulus < sections[2].youngs_modulus)
        throw std::invalid_argument("rod spec '" + name +
                                    "': stiffness must be non-increasing bottom to top");
    if (!std::isfinite(cross_section_side) || cross_section_side <= 0.0)
        throw std::invalid_argument("rod spec '" + name + "': cross-section side must be > 0");
    if (!std::isfinite(residual_flux) || residual_flux < 0.0)
        throw std::invalid_argument("rod spec '" + name + "': residual flux must be >= 0");
}

std::vector<double> DiscreteRod::joint_stiffness() const {
    const int n = segment_count();
    std::vector<double> c(n);
    c[0] = stiffness[0] / segment_length;
    for (int j = 1; j < n; ++j) {
        const double a = stiffness[j - 1], b = stiffness[j];
        c[j] = 2.0 * a * b / (a + b) / segment_length;
    }
    return c;
}

DiscreteRod build_rod(const RodSpec& spec, double segments_per_mm) {
    spec.validate();
    if (!std::isfinite(segments_per_mm) || segments_per_mm <= 0.0)
        throw std::invalid_argument("build_rod: resolution must be > 0");

    // Work in integer nanometers so "divides exactly" is well defined.
    std::array<std::int64_t, 3> len_nm{};
    for (int i = 0; i < 3; ++i) {
        const double nm = spec.sections[i].length * 1e9;
        len_nm[i] = static_cast<std::int64_t>(std::llround(nm));
        if (std::abs(nm - static_cast<double>(len_nm[i])) > 0.5)
            throw config_error("build_rod: section length not representable at nm precision");
    }
    const std::int64_t g = std::gcd(std::gcd(len_nm[0], len_nm[1]), len_nm[2]);
    const std::int64_t target_nm =
        static_cast<std::int64_t>(std::floor(1e6 / segments_per_mm));
    if (target_nm < 1)
        throw std::invalid_argument("build_rod: resolution too fine (< 1 nm segments)");

    // Largest g/m <= target with at least 3 segments per section.
    std::int64_t seg_nm = 0;
    for (std::int64_t m = std::max<std::int64_t>(1, (g + target_nm - 1) / target_nm);; ++m) {
        if (m > g)
            throw config_error("rod spec '" + spec.name +
                               "': section lengths admit no common segment length at this resolution");
        if (g % m != 0) continue;
        seg_nm = g / m;
        std::int64_t min_count = len_nm[0] / seg_nm;
        for (int i = 1; i < 3; ++i) min_count = std::min(min_count, len_nm[i] / seg_nm);
        if (min_count >= 3) break;
    }
    if (spec.total_length() * 1e9 / static_cast<double>(seg_nm) > 2e5)
        throw config_error("rod spec '" + spec.name +
                           "': exact division needs more than 200000 segments; "
                           "adjust section lengths or resolution");

    DiscreteRod rod;
    rod.segment_length = static_cast<double>(seg_nm) * 1e-9;
    const double side = spec.cross_section_side;
    const double second_moment = side * side * side * side / 12.0;
    const double seg_volume = side * side * rod.segment_length;
    const double seg_moment = spec.residual_flux / mu0 * seg_volume;
    for (int i = 0; i < 3; ++i) {
        const auto count = static_cast<int>(len_nm[i] / seg_nm);
        const double k = spec.sections[i].youngs_modulus * second_moment;
        for (int s = 0; s < count; ++s) {
            rod.stiffness.push_back(k);
            rod.moment.push_back(seg_moment);
            rod.section_index.push_back(i);
        }
    }
    return rod;
}

namespace {

void check_angles(const DiscreteRod& rod, std::span<const double> angles) {
    if (static_cast<int>(angles.size()) != rod.segment_count())
        throw std::invalid_argument("angle vector length does not match segment count");
}

}  // namespace

double bending_energy(const DiscreteRod& rod, std::span<const double> angles) {
    check_angles(rod, angles);
    const std::vector<double> c = rod.joint_stiffness();
    double prev = 0.0;  // clamped base
    double u = 0.0;
    for (int j = 0; j < rod.segment_count(); ++j) {
        const double d = angles[j] - prev;
        u += 0.5 * c[j] * d * d;
        prev = angles[j];
    }
    return u;
}

double zeeman_energy(const DiscreteRod& rod, std::span<const double> angles, Vec2 field) {
    check_angles(rod, angles);
    double u = 0.0;
    for (int i = 0; i < rod.segment_count(); ++i)
        u -= rod.moment[i] * (std::cos(angles[i]) * field.x + std::sin(angles[i]) * field.y);
    return u;
}

void energy_gradient(const DiscreteRod& rod, std::span<const double> angles, Vec2 field,
                     std::span<double> grad) {
    check_angles(rod, angles);
    if (grad.size() != angles.size())
        throw std::invalid_argument("gradient buffer length does not match segment count");
    const int n = rod.segment_count();
    const std::vector<double> c = rod.joint_stiffness();
    for (int j = 0; j < n; ++j) {
        const double prev = (j == 0) ? 0.0 : angles[j - 1];
        double gj = c[j] * (angles[j] - prev);
        if (j + 1 < n) gj -= c[j + 1] * (angles[j + 1] - angles[j]);
        gj += rod.moment[j] * (std::sin(angles[j]) * field.x - std::cos(angles[j]) * field.y);
        grad[j] = gj;
    }
}

std::vector<Vec2> centerline(const DiscreteRod& rod, std::span<const double> angles) {
    check_angles(rod, angles);
    std::vector<Vec2> pts;
    pts.reserve(angles.size() + 1);
    pts.push_back(Vec2{0.0, 0.0});
    double x = 0.0, y = 0.0;
    for (double th : angles) {
        x += rod.segment_length * std::cos(th);
        y += rod.segment_length * std::sin(th);
        pts.push_back(Vec2{x, y});
    }
    return pts;
}

}  // namespace magbend
