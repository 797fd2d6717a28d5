// magbend: permanent-magnet fields, graded-rod bending equilibria, curve
// fitting, parameter sweeps, surrogate training and image extraction from
// one command. Thin shell over the magbend C API.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "magbend/magbend.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNonConverged = 3;
constexpr int kExitIo = 4;

int exit_code_for(mb_status status) {
    switch (status) {
        case MB_OK: return kExitOk;
        case MB_ERR_NONCONVERGED: return kExitNonConverged;
        case MB_ERR_IO: return kExitIo;
        case MB_ERR_INTERNAL: return 1;
        default: return kExitConfig;  // argument/domain/state/config/extraction
    }
}

[[noreturn]] void fail(mb_status status) {
    std::fprintf(stderr, "magbend: %s: %s\n", mb_status_name(status), mb_last_error());
    std::exit(exit_code_for(status));
}

[[noreturn]] void fail_io(const std::string& message) {
    std::fprintf(stderr, "magbend: i/o error: %s\n", message.c_str());
    std::exit(kExitIo);
}

void check(mb_status status) {
    if (status != MB_OK) fail(status);
}

// Relative output paths land in $MAGBEND_OUT_DIR when it is set.
std::string out_path(const std::string& path) {
    const char* dir = std::getenv("MAGBEND_OUT_DIR");
    if (dir == nullptr || *dir == '\0' || path.empty()) return path;
    const std::filesystem::path p(path);
    if (p.is_absolute()) return path;
    return (std::filesystem::path(dir) / p).string();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail_io("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    const std::string full = out_path(path);
    std::ofstream out(full, std::ios::binary);
    if (!out) fail_io("cannot open '" + full + "' for writing");
    out << text;
    if (!out.flush()) fail_io("write failed for '" + full + "'");
}

void emit(const std::string& out_file, const std::string& text) {
    if (out_file.empty())
        std::fwrite(text.data(), 1, text.size(), stdout);
    else
        write_file(out_file, text);
}

std::string fmt9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

// x,y rows in mm, optional header line.
std::vector<double> read_xy_csv_mm(const std::string& path) {
    const std::string text = read_file(path);
    std::istringstream in(text);
    std::string line;
    std::vector<double> xy;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        double x = 0.0, y = 0.0;
        if (std::sscanf(line.c_str(), "%lf,%lf", &x, &y) == 2) {
            xy.push_back(x);
            xy.push_back(y);
        }
    }
    if (xy.empty()) fail_io("no x,y rows found in '" + path + "'");
    return xy;
}

bool parse_triple(const std::string& text, double out[3]) {
    return std::sscanf(text.c_str(), "%lf,%lf,%lf", &out[0], &out[1], &out[2]) == 3;
}

struct GlobalFlags {
    bool quiet = false;
    bool json = false;
};

void note(const GlobalFlags& g, const std::string& message) {
    if (!g.quiet) std::fprintf(stderr, "%s\n", message.c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"magnetic soft continuum bending toolkit"};
    app.require_subcommand(1);
    GlobalFlags global;
    app.add_flag("--quiet", global.quiet, "suppress progress notes");
    app.add_flag("--json", global.json, "prefer JSON output on stdout");

    // ---- field ----
    auto* field = app.add_subcommand("field", "axial field of the cubic driving magnet");
    double side_mm = 55.0, br_t = 0.0, distance_mm = 0.0, measured_mt = 0.0;
    int order = 32;
    bool calibrate = false;
    field->add_option("--side-mm", side_mm, "magnet side length [mm]");
    field->add_option("--br-T", br_t, "remanent flux density [T]");
    field->add_option("--distance-mm", distance_mm, "distance from the N pole face [mm]")
        ->required();
    field->add_option("--order", order, "quadrature order per axis");
    field->add_flag("--calibrate", calibrate, "back-calculate remanence from a probe reading");
    field->add_option("--measured-mT", measured_mt, "measured flux density [mT]");

    // ---- solve ----
    auto* solve = app.add_subcommand("solve", "planar bending equilibrium of a rod spec");
    std::string spec_path, solve_out;
    double field_mt = 0.0, angle_deg = 90.0, resolution = 2.0;
    solve->add_option("--spec", spec_path, "rod spec JSON file")->required();
    solve->add_option("--field-mT", field_mt, "uniform field strength [mT]")->required();
    solve->add_option("--angle-deg", angle_deg, "field angle from the rod axis [deg]");
    solve->add_option("--resolution", resolution, "segments per mm");
    solve->add_option("--out", solve_out, "output file (.json or .csv; default stdout JSON)");

    // ---- fit ----
    auto* fit = app.add_subcommand("fit", "scalar descriptors of an x,y curve");
    std::string fit_in, fit_metric = "quad";
    double base_angle_deg = 0.0;
    fit->add_option("--in", fit_in, "CSV of x,y points in mm")->required();
    fit->add_option("--metric", fit_metric, "quad | radius | curvature")
        ->check(CLI::IsMember({"quad", "radius", "curvature"}));
    fit->add_option("--base-angle-deg", base_angle_deg,
                    "clamp direction to rotate out before fitting");

    // ---- sweep ----
    auto* sweep = app.add_subcommand("sweep", "run a (spec, field, angle) grid");
    std::string sweep_config, sweep_csv, sweep_json, sweep_dataset;
    int threads = 1;
    sweep->add_option("--config", sweep_config, "grid config JSON file")->required();
    sweep->add_option("--out-csv", sweep_csv, "library CSV output path");
    sweep->add_option("--out-json", sweep_json, "library JSON output path");
    sweep->add_option("--out-dataset", sweep_dataset, "training dataset CSV output path");
    sweep->add_option("--threads", threads, "parallel grid workers");

    // ---- train ----
    auto* train = app.add_subcommand("train", "train the bending-coefficient surrogate");
    std::string train_dataset, train_out;
    double holdout_mt = 0.0, lr = 1e-3;
    int epochs = 5000;
    std::uint64_t seed = 42;
    train->add_option("--dataset", train_dataset, "dataset CSV file")->required();
    train->add_option("--holdout-mT", holdout_mt, "field held out for testing [mT]")
        ->required();
    train->add_option("--epochs", epochs, "training epochs");
    train->add_option("--seed", seed, "weight initialization seed");
    train->add_option("--lr", lr, "Adam learning rate");
    train->add_option("--out", train_out, "model JSON output path")->required();

    // ---- predict ----
    auto* predict = app.add_subcommand("predict", "instant coefficient prediction");
    std::string model_path, e_mpa_text, l_mm_text;
    double pr_mt = 0.0, pr_cs_mm = 0.0;
    predict->add_option("--model", model_path, "model JSON file")->required();
    predict->add_option("--mt-mT", pr_mt, "field strength [mT]")->required();
    predict->add_option("--e-MPa", e_mpa_text, "moduli triple a,b,c [MPa]")->required();
    predict->add_option("--l-mm", l_mm_text, "section length triple a,b,c [mm]")->required();
    predict->add_option("--cs-mm", pr_cs_mm, "cross-section side [mm]")->required();

    // ---- extract ----
    auto* extract = app.add_subcommand("extract", "centerline from a PGM photograph");
    std::string image_path, extract_axis = "x", extract_out;
    int threshold = 128;
    double scale_mm_per_px = 0.0;
    extract->add_option("--image", image_path, "binary P5 PGM file")->required();
    extract->add_option("--threshold", threshold, "binarization threshold (0-255)");
    extract->add_option("--axis", extract_axis, "scan axis: x (columns) or y (rows)")
        ->check(CLI::IsMember({"x", "y"}));
    extract->add_option("--scale-mm-per-px", scale_mm_per_px, "physical scale [mm/pixel]")
        ->required();
    extract->add_option("--out", extract_out, "output CSV path (default stdout)");

    // ---- render ----
    auto* render = app.add_subcommand("render", "plot labeled curves as SVG");
    std::vector<std::string> curve_args;
    std::string render_out, render_title;
    int width_px = 800, height_px = 600;
    render->add_option("--curve", curve_args, "label=path.csv (repeatable)")->required();
    render->add_option("--out", render_out, "SVG output path (default stdout)");
    render->add_option("--title", render_title, "plot title");
    render->add_option("--width", width_px, "canvas width [px]");
    render->add_option("--height", height_px, "canvas height [px]");

    for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();
    CLI11_PARSE(app, argc, argv);

    if (field->parsed()) {
        const double side = side_mm * 1e-3, dist = distance_mm * 1e-3;
        if (calibrate) {
            if (measured_mt <= 0.0) {
                std::fprintf(stderr, "magbend: --calibrate requires --measured-mT > 0\n");
                return kExitConfig;
            }
            double br = 0.0;
            check(mb_field_calibrate(side, dist, measured_mt * 1e-3, order, &br));
            if (global.json)
                std::printf("{\"br_T\": %s}\n", fmt9(br).c_str());
            else
                std::printf("Br = %s T\n", fmt9(br).c_str());
            return kExitOk;
        }
        if (br_t <= 0.0) {
            std::fprintf(stderr, "magbend: field needs --br-T (or --calibrate)\n");
            return kExitConfig;
        }
        double h = 0.0, b = 0.0;
        check(mb_field_axial(side, br_t, dist, order, &h, &b));
        if (global.json)
            std::printf("{\"h_A_per_m\": %s, \"b_mT\": %s}\n", fmt9(h).c_str(),
                        fmt9(b * 1e3).c_str());
        else
            std::printf("H = %s A/m\nB = %s mT\n", fmt9(h).c_str(), fmt9(b * 1e3).c_str());
        return kExitOk;
    }

    if (solve->parsed()) {
        const std::string spec_json = read_file(spec_path);
        mb_rod* rod = nullptr;
        check(mb_rod_from_json(spec_json.c_str(), resolution, &rod));
        mb_equilibrium* eq = nullptr;
        const double angle = angle_deg * std::acos(-1.0) / 180.0;
        check(mb_solve(rod, field_mt * 1e-3, angle, nullptr, &eq));
        int32_t converged = 0;
        check(mb_equilibrium_converged(eq, &converged));

        const bool csv = solve_out.size() > 4 &&
                         solve_out.compare(solve_out.size() - 4, 4, ".csv") == 0;
        if (csv) {
            int32_t n = 0;
            check(mb_equilibrium_angle_count(eq, &n));
            std::vector<double> xy(2 * (n + 1));
            check(mb_equilibrium_centerline(eq, xy.data(), static_cast<int32_t>(xy.size())));
            std::string text = "x_mm,y_mm\n";
            for (int32_t i = 0; i <= n; ++i)
                text += fmt9(xy[2 * i] * 1e3) + "," + fmt9(xy[2 * i + 1] * 1e3) + "\n";
            emit(solve_out, text);
        } else {
            char* json = nullptr;
            check(mb_equilibrium_to_json(eq, &json));
            emit(solve_out, json);
            mb_string_free(json);
        }
        mb_equilibrium_free(eq);
        mb_rod_free(rod);
        if (converged == 0) {
            note(global, "solve did not converge; result flagged");
            return kExitNonConverged;
        }
        return kExitOk;
    }

    if (fit->parsed()) {
        std::vector<double> xy = read_xy_csv_mm(fit_in);
        const int32_t n = static_cast<int32_t>(xy.size() / 2);
        // mm -> m, and rotate out a nonzero clamp direction if requested.
        const double beta = base_angle_deg * std::acos(-1.0) / 180.0;
        const double c = std::cos(-beta), s = std::sin(-beta);
        for (int32_t i = 0; i < n; ++i) {
            const double x = xy[2 * i] * 1e-3, y = xy[2 * i + 1] * 1e-3;
            xy[2 * i] = c * x - s * y;
            xy[2 * i + 1] = s * x + c * y;
        }
        if (fit_metric == "quad") {
            double a = 0.0, rms = 0.0;
            check(mb_fit_quadratic(xy.data(), n, &a, &rms));
            std::printf("{\"a_per_mm\": %s, \"rms_mm\": %s, \"n_points\": %d}\n",
                        fmt9(a * 1e-3).c_str(), fmt9(rms * 1e3).c_str(), n);
        } else if (fit_metric == "radius") {
            double radius = 0.0;
            check(mb_bending_radius(xy.data(), n, &radius));
            if (std::isinf(radius))
                std::printf("{\"radius_mm\": null}\n");
            else
                std::printf("{\"radius_mm\": %s}\n", fmt9(radius * 1e3).c_str());
        } else {
            std::vector<double> kappa(std::max<int32_t>(1, n));
            int32_t got = 0;
            check(mb_polyline_curvature(xy.data(), n, kappa.data(),
                                        static_cast<int32_t>(kappa.size()), &got));
            std::string text = "{\"curvature_per_mm\": [";
            for (int32_t i = 0; i < got; ++i) {
                if (i > 0) text += ", ";
                text += fmt9(kappa[i] * 1e-3);
            }
            text += "]}\n";
            std::fputs(text.c_str(), stdout);
        }
        return kExitOk;
    }

    if (sweep->parsed()) {
        const std::string config = read_file(sweep_config);
        const std::string base_dir =
            std::filesystem::path(sweep_config).parent_path().string();
        char* records = nullptr;
        int32_t any_nonconverged = 0;
        check(mb_sweep_run(config.c_str(), base_dir.empty() ? nullptr : base_dir.c_str(),
                           threads, &records, &any_nonconverged));
        if (!sweep_json.empty()) write_file(sweep_json, records);
        if (!sweep_csv.empty()) {
            char* csv = nullptr;
            check(mb_library_to_csv(records, &csv));
            write_file(sweep_csv, csv);
            mb_string_free(csv);
        }
        if (sweep_json.empty() && sweep_csv.empty() && sweep_dataset.empty())
            std::fputs(records, stdout);
        mb_string_free(records);
        if (!sweep_dataset.empty()) {
            char* dataset = nullptr;
            check(mb_dataset_generate(
                config.c_str(), base_dir.empty() ? nullptr : base_dir.c_str(), &dataset));
            write_file(sweep_dataset, dataset);
            mb_string_free(dataset);
        }
        if (any_nonconverged != 0) {
            note(global, "sweep finished with non-converged grid points");
            return kExitNonConverged;
        }
        note(global, "sweep complete");
        return kExitOk;
    }

    if (train->parsed()) {
        const std::string dataset = read_file(train_dataset);
        mb_train_options opts;
        mb_train_options_init(&opts);
        opts.epochs = epochs;
        opts.learning_rate = lr;
        opts.seed = seed;
        mb_model* model = nullptr;
        char* report = nullptr;
        check(mb_model_train_csv(dataset.c_str(), holdout_mt, &opts, &model, &report));
        char* model_json = nullptr;
        check(mb_model_to_json(model, &model_json));
        write_file(train_out, model_json);
        mb_string_free(model_json);
        if (!global.quiet) std::fputs(report, stdout);
        mb_string_free(report);
        mb_model_free(model);
        return kExitOk;
    }

    if (predict->parsed()) {
        double e_mpa[3], l_mm[3];
        if (!parse_triple(e_mpa_text, e_mpa) || !parse_triple(l_mm_text, l_mm)) {
            std::fprintf(stderr, "magbend: --e-MPa and --l-mm take comma triples a,b,c\n");
            return kExitConfig;
        }
        const std::string model_json = read_file(model_path);
        mb_model* model = nullptr;
        check(mb_model_from_json(model_json.c_str(), &model));
        const double e_pa[3] = {e_mpa[0] * 1e6, e_mpa[1] * 1e6, e_mpa[2] * 1e6};
        const double l_m[3] = {l_mm[0] * 1e-3, l_mm[1] * 1e-3, l_mm[2] * 1e-3};
        double a = 0.0;
        const mb_status status =
            mb_model_predict(model, pr_mt * 1e-3, e_pa, l_m, pr_cs_mm * 1e-3, &a);
        mb_model_free(model);
        check(status);
        if (global.json)
            std::printf("{\"a_per_mm\": %s}\n", fmt9(a * 1e-3).c_str());
        else
            std::printf("a = %s 1/mm\n", fmt9(a * 1e-3).c_str());
        return kExitOk;
    }

    if (extract->parsed()) {
        uint8_t* pixels = nullptr;
        int32_t width = 0, height = 0;
        check(mb_pgm_read(image_path.c_str(), &pixels, &width, &height));
        double* xy = nullptr;
        int32_t n = 0;
        const mb_status status = mb_extract_centerline(
            pixels, width, height, threshold, extract_axis[0], scale_mm_per_px, &xy, &n);
        mb_bytes_free(pixels);
        check(status);
        std::string text = "x_mm,y_mm\n";
        for (int32_t i = 0; i < n; ++i)
            text += fmt9(xy[2 * i]) + "," + fmt9(xy[2 * i + 1]) + "\n";
        mb_buffer_free(xy);
        emit(extract_out, text);
        return kExitOk;
    }

    if (render->parsed()) {
        std::string curves_json = "[";
        for (size_t i = 0; i < curve_args.size(); ++i) {
            const size_t eq_at = curve_args[i].find('=');
            std::string label = "curve" + std::to_string(i);
            std::string path = curve_args[i];
            if (eq_at != std::string::npos) {
                label = curve_args[i].substr(0, eq_at);
                path = curve_args[i].substr(eq_at + 1);
            }
            const std::vector<double> xy = read_xy_csv_mm(path);
            if (i > 0) curves_json += ",";
            curves_json += "{\"label\":\"" + label + "\",\"points_mm\":[";
            for (size_t j = 0; j + 1 < xy.size(); j += 2) {
                if (j > 0) curves_json += ",";
                curves_json += "[" + fmt9(xy[j]) + "," + fmt9(xy[j + 1]) + "]";
            }
            curves_json += "]}";
        }
        curves_json += "]";
        char* svg = nullptr;
        check(mb_render_svg(curves_json.c_str(), width_px, height_px,
                            render_title.empty() ? nullptr : render_title.c_str(), &svg));
        emit(render_out, svg);
        mb_string_free(svg);
        return kExitOk;
    }

    return kExitConfig;
}
