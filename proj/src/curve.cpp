#include "magbend/curve.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace magbend {

Curve2D root_align(const Curve2D& curve, double base_angle) {
    if (curve.points.empty()) return curve;
    Curve2D out;
    out.source = curve.source;
    out.points.reserve(curve.points.size());
    const Vec2 origin = curve.points.front();
    const double ca = std::cos(-base_angle), sa = std::sin(-base_angle);
    for (const Vec2& p : curve.points) {
        const double x = p.x - origin.x, y = p.y - origin.y;
        out.points.push_back(Vec2{ca * x - sa * y, sa * x + ca * y});
    }
    return out;
}

QuadraticFit fit_quadratic(const Curve2D& curve) {
    if (curve.points.size() < 3)
        throw std::invalid_argument("fit_quadratic: need at least 3 points");
    const Curve2D aligned = root_align(curve);
    double prev_x = -std::numeric_limits<double>::infinity();
    for (const Vec2& p : aligned.points) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw std::invalid_argument("fit_quadratic: non-finite point");
        if (p.x <= prev_x)
            throw std::invalid_argument("fit_quadratic: x must be strictly increasing");
        prev_x = p.x;
    }

    double sx2y = 0.0, sx4 = 0.0;
    for (const Vec2& p : aligned.points) {
        const double x2 = p.x * p.x;
        sx2y += x2 * p.y;
        sx4 += x2 * x2;
    }
    if (sx4 == 0.0)
        throw std::domain_error("fit_quadratic: all x are zero, fit is degenerate");

    QuadraticFit fit;
    fit.a = sx2y / sx4;
    fit.n_points = static_cast<int>(aligned.points.size());
    double ss = 0.0;
    for (const Vec2& p : aligned.points) {
        const double r = p.y - fit.a * p.x * p.x;
        ss += r * r;
    }
    fit.rms_residual = std::sqrt(ss / aligned.points.size());
    return fit;
}

double bending_radius(const Curve2D& curve) {
    const auto& pts = curve.points;
    if (pts.size() < 3)
        throw std::invalid_argument("bending_radius: need at least 3 points");

    // Kasa fit: minimize sum (x^2+y^2 - 2*cx*x - 2*cy*y - c0)^2. Normal
    // equations in (cx, cy, c0), solved by 3x3 Cramer with a centered frame
    // for conditioning.
    double mx = 0.0, my = 0.0;
    for (const Vec2& p : pts) {
        mx += p.x;
        my += p.y;
    }
    mx /= pts.size();
    my /= pts.size();

    double sxx = 0, sxy = 0, syy = 0, sx = 0, sy = 0, sxz = 0, syz = 0, sz = 0;
    double scale = 0.0;
    const double n = static_cast<double>(pts.size());
    for (const Vec2& p : pts) {
        const double x = p.x - mx, y = p.y - my;
        const double z = x * x + y * y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
        sx += x;
        sy += y;
        sxz += x * z;
        syz += y * z;
        sz += z;
        scale = std::max({scale, std::abs(x), std::abs(y)});
    }
    // With centered coordinates sx = sy = 0, so the system decouples:
    //   [sxx sxy][cx]   [sxz/2]
    //   [sxy syy][cy] = [syz/2],  c0 = (sz - 2*cx*sx - 2*cy*sy)/n = sz/n - ...
    const double det = sxx * syy - sxy * sxy;
    if (scale == 0.0) throw std::invalid_argument("bending_radius: degenerate input");
    if (std::abs(det) <= 1e-12 * scale * scale * scale * scale * n * n)
        return std::numeric_limits<double>::infinity();
    const double cx = (0.5 * sxz * syy - 0.5 * syz * sxy) / det;
    const double cy = (0.5 * syz * sxx - 0.5 * sxz * sxy) / det;
    const double c0 = sz / n;
    const double r2 = c0 + cx * cx + cy * cy;
    return r2 > 0.0 ? std::sqrt(r2) : std::numeric_limits<double>::infinity();
}

std::vector<double> polyline_curvature(const std::vector<Vec2>& points) {
    if (points.size() < 3)
        throw std::invalid_argument("polyline_curvature: need at least 3 points");
    std::vector<double> kappa;
    kappa.reserve(points.size() - 2);
    for (size_t i = 1; i + 1 < points.size(); ++i) {
        const double ax = points[i].x - points[i - 1].x;
        const double ay = points[i].y - points[i - 1].y;
        const double bx = points[i + 1].x - points[i].x;
        const double by = points[i + 1].y - points[i].y;
        const double la = std::hypot(ax, ay), lb = std::hypot(bx, by);
        if (la == 0.0 || lb == 0.0)
            throw std::invalid_argument("polyline_curvature: repeated point");
        // Signed turning angle between consecutive segments.
        const double turn = std::atan2(ax * by - ay * bx, ax * bx + ay * by);
        kappa.push_back(turn / (0.5 * (la + lb)));
    }
    return kappa;
}

std::vector<double> curvature_profile(const Equilibrium& eq) {
    if (eq.joint_angles.empty() || eq.segment_length <= 0.0)
        throw std::invalid_argument("curvature_profile: equilibrium carries no rod geometry");
    std::vector<double> kappa;
    kappa.reserve(eq.joint_angles.size());
    double prev = eq.base_angle;
    for (double th : eq.joint_angles) {
        kappa.push_back((th - prev) / eq.segment_length);
        prev = th;
    }
    return kappa;
}

}  // namespace magbend
