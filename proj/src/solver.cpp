#include "magbend/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace magbend {

namespace {

struct Workspace {
    const DiscreteRod& rod;
    std::vector<double> c;  // joint stiffness, c[0] is the base clamp
    double base_angle;

    double energy(const std::vector<double>& th, Vec2 field, double tip_moment) const {
        const int n = rod.segment_count();
        double u = 0.0;
        double prev = base_angle;
        for (int j = 0; j < n; ++j) {
            const double d = th[j] - prev;
            u += 0.5 * c[j] * d * d;
            u -= rod.moment[j] * (std::cos(th[j]) * field.x + std::sin(th[j]) * field.y);
            prev = th[j];
        }
        return u - tip_moment * th[n - 1];
    }

    void gradient(const std::vector<double>& th, Vec2 field, double tip_moment,
                  std::vector<double>& g) const {
        const int n = rod.segment_count();
        for (int j = 0; j < n; ++j) {
            const double prev = (j == 0) ? base_angle : th[j - 1];
            double gj = c[j] * (th[j] - prev);
            if (j + 1 < n) gj -= c[j + 1] * (th[j + 1] - th[j]);
            gj += rod.moment[j] * (std::sin(th[j]) * field.x - std::cos(th[j]) * field.y);
            g[j] = gj;
        }
        g[n - 1] -= tip_moment;
    }

    void hessian(const std::vector<double>& th, Vec2 field, std::vector<double>& diag,
                 std::vector<double>& off) const {
        const int n = rod.segment_count();
        for (int j = 0; j < n; ++j) {
            double d = c[j];
            if (j + 1 < n) d += c[j + 1];
            d += rod.moment[j] * (std::cos(th[j]) * field.x + std::sin(th[j]) * field.y);
            diag[j] = d;
        }
        for (int j = 0; j + 1 < n; ++j) off[j] = -c[j + 1];
    }
};

double max_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// LDL^T pivots of the (shifted) tridiagonal; false on a non-positive pivot.
bool ldlt_pivots_positive(const std::vector<double>& diag, const std::vector<double>& off,
                          double shift) {
    const int n = static_cast<int>(diag.size());
    double d = diag[0] + shift;
    if (d <= 0.0) return false;
    for (int j = 1; j < n; ++j) {
        d = diag[j] + shift - off[j - 1] * off[j - 1] / d;
        if (d <= 0.0 || !std::isfinite(d)) return false;
    }
    return true;
}

// Solve (T + shift*I) x = rhs by the Thomas algorithm; requires positive pivots.
bool thomas_solve(const std::vector<double>& diag, const std::vector<double>& off, double shift,
                  const std::vector<double>& rhs, std::vector<double>& x,
                  std::vector<double>& scratch_d, std::vector<double>& scratch_r) {
    const int n = static_cast<int>(diag.size());
    scratch_d[0] = diag[0] + shift;
    scratch_r[0] = rhs[0];
    if (scratch_d[0] <= 0.0) return false;
    for (int j = 1; j < n; ++j) {
        const double w = off[j - 1] / scratch_d[j - 1];
        scratch_d[j] = diag[j] + shift - w * off[j - 1];
        scratch_r[j] = rhs[j] - w * scratch_r[j - 1];
        if (scratch_d[j] <= 0.0 || !std::isfinite(scratch_d[j])) return false;
    }
    x[n - 1] = scratch_r[n - 1] / scratch_d[n - 1];
    for (int j = n - 2; j >= 0; --j)
        x[j] = (scratch_r[j] - off[j] * x[j + 1]) / scratch_d[j];
    return true;
}

}  // namespace

Equilibrium solve_equilibrium(const DiscreteRod& rod, double field_magnitude,
                              double field_angle, const SolverOptions& opts) {
    if (!std::isfinite(field_magnitude) || field_magnitude < 0.0)
        throw std::invalid_argument("solve_equilibrium: field magnitude must be >= 0");
    if (!std::isfinite(field_angle))
        throw std::invalid_argument("solve_equilibrium: field angle must be finite");
    if (opts.continuation_steps < 1 || opts.max_iters < 1 || opts.tolerance <= 0.0)
        throw std::invalid_argument("solve_equilibrium: bad solver options");
    const int n = rod.segment_count();
    if (n < 1) throw std::invalid_argument("solve_equilibrium: empty rod");

    Workspace ws{rod, rod.joint_stiffness(), opts.base_angle};
    std::vector<double> th(n, opts.base_angle);
    std::vector<double> g(n), diag(n), off(std::max(0, n - 1)), step(n);
    std::vector<double> trial(n), sd(n), sr(n);

    Equilibrium eq;
    eq.segment_length = rod.segment_length;
    eq.base_angle = opts.base_angle;
    eq.section_index = rod.section_index;
    eq.converged = true;

    double grad_norm = 0.0;
    const double shift_floor = 1e-12 * *std::max_element(ws.c.begin(), ws.c.end());

    for (int s = 1; s <= opts.continuation_steps; ++s) {
        const double frac = static_cast<double>(s) / opts.continuation_steps;
        const Vec2 field = uniform_field(field_magnitude * frac, field_angle);
        const double tip_m = opts.tip_moment * frac;

        // Measure-zero unstable equilibrium: zero gradient with an indefinite
        // Hessian (field exactly parallel/antiparallel to every tangent).
        // Nudge all angles toward +y so the bending direction is deterministic.
        ws.gradient(th, field, tip_m, g);
        if (max_norm(g) < opts.tolerance) {
            ws.hessian(th, field, diag, off);
            if (!ldlt_pivots_positive(diag, off, 0.0))
                for (double& t : th) t += 1e-6;
        }

        bool step_converged = false;
        for (int it = 0; it < opts.max_iters; ++it) {
            ws.gradient(th, field, tip_m, g);
            grad_norm = max_norm(g);
            if (grad_norm < opts.tolerance) {
                step_converged = true;
                break;
            }
            ++eq.iterations;
            ws.hessian(th, field, diag, off);

            for (int j = 0; j < n; ++j) step[j] = -g[j];
            double shift = 0.0;
            bool solved = thomas_solve(diag, off, shift, step, trial, sd, sr);
            while (!solved && shift < 1e18 * shift_floor) {
                shift = std::max(shift * 10.0, shift_floor);
                solved = thomas_solve(diag, off, shift, step, trial, sd, sr);
            }

            const double e0 = ws.energy(th, field, tip_m);
            bool moved = false;
            if (solved) {
                double t = 1.0;
                for (int h = 0; h < 60; ++h) {
                    for (int j = 0; j < n; ++j) step[j] = th[j] + t * trial[j];
                    if (ws.energy(step, field, tip_m) <= e0) {
                        th.swap(step);
                        moved = true;
                        break;
                    }
                    t *= 0.5;
                }
            }
            if (!moved) {
                // Gradient descent fallback with backtracking.
                double t = 1.0 / *std::max_element(diag.begin(), diag.end());
                for (int h = 0; h < 200; ++h) {
                    for (int j = 0; j < n; ++j) step[j] = th[j] - t * g[j];
                    if (ws.energy(step, field, tip_m) < e0) {
                        th.swap(step);
                        moved = true;
                        break;
                    }
                    t *= 0.5;
                }
            }
            if (!moved) break;  // stuck; the gradient check above decides the flag
        }
        eq.continuation_steps_used = s;
        if (!step_converged) {
            eq.converged = false;
            break;
        }
    }

    const Vec2 field = uniform_field(field_magnitude, field_angle);
    eq.joint_angles = th;
    eq.points = centerline(rod, th);
    eq.gradient_norm = grad_norm;
    {
        // Bending energy about the actual clamp direction.
        double u = 0.0, prev = opts.base_angle;
        for (int j = 0; j < n; ++j) {
            const double d = th[j] - prev;
            u += 0.5 * ws.c[j] * d * d;
            prev = th[j];
        }
        eq.bending_energy = u;
    }
    eq.zeeman_energy = zeeman_energy(rod, th, field);
    return eq;
}

}  // namespace magbend
