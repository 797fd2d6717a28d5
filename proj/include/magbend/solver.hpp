#pragma once

// Planar equilibrium of a discrete elastica in a uniform field: total energy
// minimized by damped Newton on the tridiagonal Hessian, with the field
// ramped from zero in equal continuation increments.

#include <vector>

#include "magbend/rod.hpp"

namespace magbend {

struct SolverOptions {
    int continuation_steps = 20;
    double tolerance = 1e-10;  // N*m, max-norm of the gradient
    int max_iters = 500;       // Newton iterations per continuation step
    double base_angle = 0.0;   // clamp direction, radians from +x
    double tip_moment = 0.0;   // external moment on the last segment, N*m
};

struct Equilibrium {
    std::vector<double> joint_angles;    // absolute tangent angle per segment
    std::vector<Vec2> points;            // n+1 centerline points, base at origin
    double bending_energy = 0.0;         // J
    double zeeman_energy = 0.0;          // J
    double gradient_norm = 0.0;          // N*m, max-norm at exit
    bool converged = false;
    int continuation_steps_used = 0;
    int iterations = 0;                  // Newton iterations over all steps

    // Carried from the rod and options so curvature analysis needs no
    // second argument.
    double segment_length = 0.0;
    double base_angle = 0.0;
    std::vector<int> section_index;
};

Equilibrium solve_equilibrium(const DiscreteRod& rod, double field_magnitude,
                              double field_angle, const SolverOptions& opts = {});

}  // namespace magbend
