#pragma once

// Three-section graded-stiffness rod as a discrete elastica: rigid segments
// of uniform length joined by elastic hinges, magnetization frozen along the
// local tangent. All quantities SI.

#include <array>
#include <span>
#include <string>
#include <vector>

#include "magbend/field.hpp"

namespace magbend {

struct Section {
    double length = 0.0;          // m
    double youngs_modulus = 0.0;  // Pa
    std::string label;            // bottom | middle | top
};

struct RodSpec {
    std::string name;
    std::array<Section, 3> sections;  // ordered bottom -> top
    double cross_section_side = 0.0;  // m, square profile
    double residual_flux = 0.0;       // T

    double total_length() const;
    void validate() const;  // throws std::invalid_argument
};

struct DiscreteRod {
    double segment_length = 0.0;         // m, uniform
    std::vector<double> stiffness;       // k_i = E_i * I, N*m^2 per segment
    std::vector<double> moment;          // m_i = (residual_flux/mu0) * V_seg, A*m^2
    std::vector<int> section_index;      // 0|1|2 per segment

    int segment_count() const { return static_cast<int>(stiffness.size()); }
    double total_length() const { return segment_length * stiffness.size(); }

    // Hinge compliance c_j in N*m/rad: c[0] clamps the base with k_0; c[j]
    // couples segments j-1 and j through the harmonic mean of their k.
    std::vector<double> joint_stiffness() const;
};

// Discretize `spec` into rigid segments. The segment length is the largest
// value <= 1mm/segments_per_mm that divides every section length exactly;
// every section must end up with at least 3 segments.
DiscreteRod build_rod(const RodSpec& spec, double segments_per_mm);

// U_b = sum_j 1/2 * c_j * (theta_j - theta_{j-1})^2 with theta_{-1} = base angle 0.
double bending_energy(const DiscreteRod& rod, std::span<const double> angles);

// U_z = -sum_i m_i * (cos theta_i, sin theta_i) . B
double zeeman_energy(const DiscreteRod& rod, std::span<const double> angles, Vec2 field);

// Analytic d(U_b + U_z)/d(theta); grad must have segment_count() entries.
void energy_gradient(const DiscreteRod& rod, std::span<const double> angles, Vec2 field,
                     std::span<double> grad);

// Forward kinematics from the clamped origin; returns n+1 points.
std::vector<Vec2> centerline(const DiscreteRod& rod, std::span<const double> angles);

}  // namespace magbend
