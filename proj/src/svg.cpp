#include "magbend/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace magbend {

namespace {

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

// Largest "nice" tick step (1/2/5 x 10^k) giving at most `max_ticks` intervals.
double nice_step(double span, int max_ticks) {
    if (span <= 0.0) return 1.0;
    const double raw = span / max_ticks;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (mag * m >= raw) return mag * m;
    }
    return mag * 10.0;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

}  // namespace

std::string render_svg(const std::vector<LabeledCurve>& curves, const SvgOptions& opts) {
    if (curves.empty()) throw std::invalid_argument("render_svg: need at least one curve");

    std::vector<const LabeledCurve*> drawn;
    std::string warnings;
    for (const LabeledCurve& lc : curves) {
        if (lc.curve.points.empty())
            warnings += "<!-- warning: curve '" + lc.label + "' is empty, skipped -->\n";
        else
            drawn.push_back(&lc);
    }

    // Data bounds in mm.
    double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
    bool first = true;
    for (const LabeledCurve* lc : drawn) {
        for (const Vec2& p : lc->curve.points) {
            const double x = p.x * 1e3, y = p.y * 1e3;
            if (first) {
                x0 = x1 = x;
                y0 = y1 = y;
                first = false;
            }
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
        }
    }
    if (x1 - x0 < 1e-9) x1 = x0 + 1.0;
    if (y1 - y0 < 1e-9) y1 = y0 + 1.0;

    const double ml = 60, mr = 20, mt = opts.title.empty() ? 20 : 40, mb = 45;
    const double pw = opts.width_px - ml - mr, ph = opts.height_px - mt - mb;
    auto px = [&](double x) { return ml + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return mt + ph - (y - y0) / (y1 - y0) * ph; };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
           std::to_string(opts.width_px) + "\" height=\"" + std::to_string(opts.height_px) +
           "\" viewBox=\"0 0 " + std::to_string(opts.width_px) + " " +
           std::to_string(opts.height_px) + "\">\n";
    svg += warnings;
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!opts.title.empty())
        svg += "<text x=\"" + num(ml + pw / 2) +
               "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
               "font-size=\"16\">" +
               opts.title + "</text>\n";

    // Grid and ticks.
    const double sx = nice_step(x1 - x0, 8), sy = nice_step(y1 - y0, 8);
    svg += "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
    for (double t = std::ceil(x0 / sx) * sx; t <= x1 + 1e-9 * sx; t += sx) {
        svg += "<line x1=\"" + num(px(t)) + "\" y1=\"" + num(mt) + "\" x2=\"" + num(px(t)) +
               "\" y2=\"" + num(mt + ph) + "\" stroke=\"#ddd\"/>\n";
        svg += "<text x=\"" + num(px(t)) + "\" y=\"" + num(mt + ph + 16) +
               "\" text-anchor=\"middle\">" + num(t) + "</text>\n";
    }
    for (double t = std::ceil(y0 / sy) * sy; t <= y1 + 1e-9 * sy; t += sy) {
        svg += "<line x1=\"" + num(ml) + "\" y1=\"" + num(py(t)) + "\" x2=\"" + num(ml + pw) +
               "\" y2=\"" + num(py(t)) + "\" stroke=\"#ddd\"/>\n";
        svg += "<text x=\"" + num(ml - 6) + "\" y=\"" + num(py(t) + 4) +
               "\" text-anchor=\"end\">" + num(t) + "</text>\n";
    }
    svg += "<text x=\"" + num(ml + pw / 2) + "\" y=\"" + num(mt + ph + 34) +
           "\" text-anchor=\"middle\">x (mm)</text>\n";
    svg += "<text x=\"14\" y=\"" + num(mt + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 14 " +
           num(mt + ph / 2) + ")\">y (mm)</text>\n";
    svg += "</g>\n";
    svg += "<rect x=\"" + num(ml) + "\" y=\"" + num(mt) + "\" width=\"" + num(pw) +
           "\" height=\"" + num(ph) + "\" fill=\"none\" stroke=\"#333\"/>\n";

    // Curves.
    for (size_t i = 0; i < drawn.size(); ++i) {
        const char* color = kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))];
        svg += "<polyline fill=\"none\" stroke=\"";
        svg += color;
        svg += "\" stroke-width=\"1.5\" points=\"";
        for (const Vec2& p : drawn[i]->curve.points) {
            svg += num(px(p.x * 1e3));
            svg += ',';
            svg += num(py(p.y * 1e3));
            svg += ' ';
        }
        if (!drawn[i]->curve.points.empty()) svg.pop_back();
        svg += "\"/>\n";
    }

    // Legend.
    svg += "<g font-family=\"sans-serif\" font-size=\"12\">\n";
    for (size_t i = 0; i < drawn.size(); ++i) {
        const char* color = kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))];
        const double ly = mt + 14 + 16.0 * static_cast<double>(i);
        svg += "<line x1=\"" + num(ml + pw - 120) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" +
               num(ml + pw - 100) + "\" y2=\"" + num(ly - 4) + "\" stroke=\"";
        svg += color;
        svg += "\" stroke-width=\"2\"/>\n";
        svg += "<text x=\"" + num(ml + pw - 94) + "\" y=\"" + num(ly) + "\">" + drawn[i]->label +
               "</text>\n";
    }
    svg += "</g>\n</svg>\n";
    return svg;
}

}  // namespace magbend
