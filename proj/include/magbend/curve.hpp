#pragma once

// Scalar descriptors of planar bending curves: the one-parameter quadratic
// trajectory coefficient, best-fit circle radius, and per-joint curvature.

#include <vector>

#include "magbend/solver.hpp"

namespace magbend {

enum class CurveSource { simulation, image, synthetic };

struct Curve2D {
    std::vector<Vec2> points;  // meters
    CurveSource source = CurveSource::synthetic;
};

struct QuadraticFit {
    double a = 0.0;            // 1/m
    double rms_residual = 0.0; // m
    int n_points = 0;
};

// Least-squares y = a*x^2 with the first point translated to the origin.
// Requires >= 3 points and strictly increasing x after alignment.
QuadraticFit fit_quadratic(const Curve2D& curve);

// Kasa algebraic circle fit; returns +infinity for collinear input.
// Requires >= 3 points.
double bending_radius(const Curve2D& curve);

// kappa_j = (theta_j - theta_{j-1}) / segment_length, base joint included.
std::vector<double> curvature_profile(const Equilibrium& eq);

// Turning angle per unit length at the interior vertices of a polyline;
// n points give n-2 values. For external point data with no clamp joint.
std::vector<double> polyline_curvature(const std::vector<Vec2>& points);

// Rotate by -angle about the origin after translating the first point there.
// Applies the clamp-direction alignment when the base is not along +x.
Curve2D root_align(const Curve2D& curve, double base_angle = 0.0);

}  // namespace magbend
