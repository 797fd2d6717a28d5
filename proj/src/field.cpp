#include "magbend/field.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

namespace magbend {

namespace {

bool all_finite(std::initializer_list<double> xs) {
    for (double x : xs) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

const Rule& cached_rule(int n) {
    static std::map<int, Rule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    Rule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    gauss_legendre(n, r.nodes.data(), r.weights.data());
    return cache.emplace(n, std::move(r)).first->second;
}

}  // namespace

CuboidMagnet CuboidMagnet::cube(double side, double br) {
    CuboidMagnet m{side, side, side, br};
    m.validate();
    return m;
}

void CuboidMagnet::validate() const {
    if (!all_finite({xm, ym, zm, br}))
        throw std::invalid_argument("magnet: non-finite dimension or remanence");
    if (xm <= 0.0 || ym <= 0.0 || zm <= 0.0)
        throw std::invalid_argument("magnet: side lengths must be positive");
    if (br < 0.0)
        throw std::invalid_argument("magnet: remanence must be non-negative");
}

FieldValue field_from_h(double h) {
    return FieldValue{h, mu0 * h};
}

void gauss_legendre(int n, double* nodes, double* weights) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
    // Newton iteration from the Chebyshev-like initial guess; symmetric rule.
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            // Legendre recurrence up to degree n.
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
}

FieldValue axial_field(const CuboidMagnet& magnet, const AxialPoint& point, int order) {
    magnet.validate();
    if (!all_finite({point.x0, point.y0, point.z0}))
        throw std::invalid_argument("axial_field: non-finite evaluation point");
    if (order < 4)
        throw std::invalid_argument("axial_field: quadrature order must be >= 4");
    const bool inside = std::abs(point.x0) < magnet.xm / 2.0 &&
                        std::abs(point.y0) < magnet.ym / 2.0 &&
                        std::abs(point.z0) < magnet.zm / 2.0;
    if (inside)
        throw std::domain_error("axial_field: point lies inside the magnet body");

    const Rule& rule = cached_rule(order);
    const double hx = magnet.xm / 2.0, hy = magnet.ym / 2.0, hz = magnet.zm / 2.0;
    const double zn = point.z0 - hz;  // height above N face plane
    const double zs = point.z0 + hz;  // height above S face plane

    // Two charged faces, same (X0-x, Y0-y) kernel for both.
    double sum = 0.0;
    for (int i = 0; i < order; ++i) {
        const double x = hx * rule.nodes[i];
        const double wx = hx * rule.weights[i];
        const double dx2 = (point.x0 - x) * (point.x0 - x);
        for (int j = 0; j < order; ++j) {
            const double y = hy * rule.nodes[j];
            const double wy = hy * rule.weights[j];
            const double dy2 = (point.y0 - y) * (point.y0 - y);
            const double rn = std::sqrt(dx2 + dy2 + zn * zn);
            const double rs = std::sqrt(dx2 + dy2 + zs * zs);
            sum += wx * wy * (zn / (rn * rn * rn) - zs / (rs * rs * rs));
        }
    }
    const double h = magnet.br / (4.0 * std::numbers::pi * mu0) * sum;
    return field_from_h(h);
}

FieldValue axial_field_closed_form(const CuboidMagnet& magnet, double distance_from_pole) {
    magnet.validate();
    if (!std::isfinite(distance_from_pole) || distance_from_pole <= 0.0)
        throw std::domain_error("axial_field_closed_form: distance must be > 0");
    const double a = magnet.xm / 2.0, b = magnet.ym / 2.0;
    auto face_term = [&](double h) {
        return std::atan(a * b / (h * std::sqrt(a * a + b * b + h * h)));
    };
    const double h = magnet.br / (std::numbers::pi * mu0) *
                     (face_term(distance_from_pole) - face_term(distance_from_pole + magnet.zm));
    return field_from_h(h);
}

double calibrate_remanence(const CuboidMagnet& dims, double distance_from_pole,
                           double measured_b, int order) {
    if (!std::isfinite(measured_b) || measured_b <= 0.0)
        throw std::invalid_argument("calibrate_remanence: measured flux density must be > 0");
    if (!std::isfinite(distance_from_pole) || distance_from_pole <= 0.0)
        throw std::invalid_argument("calibrate_remanence: distance must be > 0");
    CuboidMagnet unit = dims;
    unit.br = 1.0;
    const AxialPoint p{0.0, 0.0, distance_from_pole + dims.zm / 2.0};
    const double b_per_br = axial_field(unit, p, order).b;
    if (b_per_br <= 0.0 || !std::isfinite(b_per_br))
        throw std::domain_error("calibrate_remanence: degenerate geometric kernel");
    return measured_b / b_per_br;
}

Vec2 uniform_field(double magnitude, double angle) {
    if (!all_finite({magnitude, angle}))
        throw std::invalid_argument("uniform_field: non-finite input");
    if (magnitude < 0.0)
        throw std::invalid_argument("uniform_field: magnitude must be >= 0");
    return Vec2{magnitude * std::cos(angle), magnitude * std::sin(angle)};
}

}  // namespace magbend
