#pragma once

// Axial field of a cuboid permanent magnet, modeled as two uniformly
// charged pole faces. Two independent evaluation routes are provided:
// tensor-product Gauss-Legendre quadrature over the faces, and the
// arctangent closed form valid on the magnetization axis. Units are SI
// throughout (meters, tesla, A/m).

#include <numbers>

namespace magbend {

inline constexpr double mu0 = 4.0e-7 * std::numbers::pi;  // T*m/A

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

// Axially magnetized cuboid; magnetization is fixed along +z.
struct CuboidMagnet {
    double xm = 0.0;  // side length along x, m
    double ym = 0.0;  // side length along y, m
    double zm = 0.0;  // side length along z (magnetization axis), m
    double br = 0.0;  // remanent flux density, T

    static CuboidMagnet cube(double side, double br);
    void validate() const;  // throws std::invalid_argument
};

// Evaluation point, origin at the magnet center, z along the magnetization axis.
struct AxialPoint {
    double x0 = 0.0;
    double y0 = 0.0;
    double z0 = 0.0;
};

// Field strength H and flux density B at one point; b == mu0*h by construction.
struct FieldValue {
    double h = 0.0;  // A/m
    double b = 0.0;  // T
};

FieldValue field_from_h(double h);

// H_z at `point` by Gauss-Legendre quadrature of the two charged pole faces.
// `point` must lie outside the magnet body; order >= 4.
FieldValue axial_field(const CuboidMagnet& magnet, const AxialPoint& point, int order = 32);

// Exact on-axis field at distance_from_pole (> 0) beyond the N pole face.
FieldValue axial_field_closed_form(const CuboidMagnet& magnet, double distance_from_pole);

// Remanence that reproduces measured_b at the given axial distance from the
// N pole face. The field is linear in Br, so this is a single division.
double calibrate_remanence(const CuboidMagnet& dims, double distance_from_pole,
                           double measured_b, int order = 32);

// Planar field vector of magnitude B at angle alpha from the undeformed rod axis.
Vec2 uniform_field(double magnitude, double angle);

// Nodes/weights of the n-point Gauss-Legendre rule on [-1, 1].
void gauss_legendre(int n, double* nodes, double* weights);

}  // namespace magbend
