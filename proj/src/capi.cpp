#include "magbend/magbend.h"

#include <cmath>
#include <cstring>
#include <limits>
#include <memory>
#include <new>
#include <string>

#include <json.hpp>

#include "magbend/curve.hpp"
#include "magbend/errors.hpp"
#include "magbend/field.hpp"
#include "magbend/pgm.hpp"
#include "magbend/solver.hpp"
#include "magbend/spec_io.hpp"
#include "magbend/surrogate.hpp"
#include "magbend/svg.hpp"
#include "magbend/sweep.hpp"

struct mb_rod {
    magbend::DiscreteRod rod;
};
struct mb_equilibrium {
    magbend::Equilibrium eq;
};
struct mb_model {
    magbend::SurrogateModel model;
};

namespace {

thread_local std::string g_last_error;

template <typename Fn>
mb_status wrap(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return MB_OK;
    } catch (const std::invalid_argument& e) {
        g_last_error = e.what();
        return MB_ERR_ARGUMENT;
    } catch (const std::domain_error& e) {
        g_last_error = e.what();
        return MB_ERR_DOMAIN;
    } catch (const std::logic_error& e) {
        g_last_error = e.what();
        return MB_ERR_STATE;
    } catch (const magbend::config_error& e) {
        g_last_error = e.what();
        return MB_ERR_CONFIG;
    } catch (const magbend::io_error& e) {
        g_last_error = e.what();
        return MB_ERR_IO;
    } catch (const magbend::extraction_error& e) {
        g_last_error = e.what();
        return MB_ERR_EXTRACTION;
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return MB_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return MB_ERR_INTERNAL;
    }
}

mb_status require(bool ok, const char* message) {
    if (ok) return MB_OK;
    g_last_error = message;
    return MB_ERR_ARGUMENT;
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.data(), s.size() + 1);
    return out;
}

magbend::SolverOptions to_cpp(const mb_solve_options* opts) {
    magbend::SolverOptions s;
    if (opts != nullptr) {
        s.continuation_steps = opts->continuation_steps;
        s.tolerance = opts->tolerance;
        s.max_iters = opts->max_iters;
        s.base_angle = opts->base_angle_rad;
        s.tip_moment = opts->tip_moment_nm;
    }
    return s;
}

std::string equilibrium_json(const magbend::Equilibrium& eq) {
    nlohmann::ordered_json j;
    j["converged"] = eq.converged;
    j["iterations"] = eq.iterations;
    j["continuation_steps_used"] = eq.continuation_steps_used;
    j["gradient_norm_Nm"] = eq.gradient_norm;
    j["bending_energy_J"] = eq.bending_energy;
    j["zeeman_energy_J"] = eq.zeeman_energy;
    j["angles_rad"] = eq.joint_angles;
    nlohmann::ordered_json pts = nlohmann::ordered_json::array();
    for (const magbend::Vec2& p : eq.points)
        pts.push_back({p.x * 1e3, p.y * 1e3});
    j["centerline_mm"] = pts;
    return j.dump(2) + "\n";
}

}  // namespace

extern "C" {

const char* mb_status_name(mb_status status) {
    switch (status) {
        case MB_OK: return "ok";
        case MB_ERR_ARGUMENT: return "argument error";
        case MB_ERR_DOMAIN: return "domain error";
        case MB_ERR_STATE: return "state error";
        case MB_ERR_CONFIG: return "configuration error";
        case MB_ERR_NONCONVERGED: return "did not converge";
        case MB_ERR_IO: return "i/o error";
        case MB_ERR_EXTRACTION: return "extraction error";
        case MB_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* mb_last_error(void) { return g_last_error.c_str(); }

void mb_string_free(char* s) { delete[] s; }
void mb_buffer_free(double* buf) { delete[] buf; }
void mb_bytes_free(uint8_t* buf) { delete[] buf; }

mb_status mb_field_axial(double side_m, double remanence_t, double dist_m, int order,
                         double* h_out, double* b_out) {
    if (mb_status s = require(h_out && b_out, "null output pointer")) return s;
    return wrap([&] {
        const auto magnet = magbend::CuboidMagnet::cube(side_m, remanence_t);
        const magbend::AxialPoint p{0.0, 0.0, dist_m + side_m / 2.0};
        const auto f = magbend::axial_field(magnet, p, order);
        *h_out = f.h;
        *b_out = f.b;
    });
}

mb_status mb_field_axial_closed_form(double side_m, double remanence_t, double dist_m,
                                     double* h_out, double* b_out) {
    if (mb_status s = require(h_out && b_out, "null output pointer")) return s;
    return wrap([&] {
        const auto magnet = magbend::CuboidMagnet::cube(side_m, remanence_t);
        const auto f = magbend::axial_field_closed_form(magnet, dist_m);
        *h_out = f.h;
        *b_out = f.b;
    });
}

mb_status mb_field_calibrate(double side_m, double dist_m, double measured_b_t, int order,
                             double* remanence_out) {
    if (mb_status s = require(remanence_out != nullptr, "null output pointer")) return s;
    return wrap([&] {
        const auto dims = magbend::CuboidMagnet::cube(side_m, 0.0);
        *remanence_out = magbend::calibrate_remanence(dims, dist_m, measured_b_t, order);
    });
}

mb_status mb_field_uniform(double magnitude_t, double angle_rad, double* bx_out,
                           double* by_out) {
    if (mb_status s = require(bx_out && by_out, "null output pointer")) return s;
    return wrap([&] {
        const magbend::Vec2 v = magbend::uniform_field(magnitude_t, angle_rad);
        *bx_out = v.x;
        *by_out = v.y;
    });
}

void mb_solve_options_init(mb_solve_options* opts) {
    if (opts == nullptr) return;
    const magbend::SolverOptions d;
    opts->continuation_steps = d.continuation_steps;
    opts->tolerance = d.tolerance;
    opts->max_iters = d.max_iters;
    opts->base_angle_rad = d.base_angle;
    opts->tip_moment_nm = d.tip_moment;
}

mb_status mb_rod_from_json(const char* spec_json, double segments_per_mm, mb_rod** out) {
    if (mb_status s = require(spec_json && out, "null pointer argument")) return s;
    return wrap([&] {
        const magbend::RodSpec spec = magbend::rod_spec_from_json(spec_json);
        *out = new mb_rod{magbend::build_rod(spec, segments_per_mm)};
    });
}

void mb_rod_free(mb_rod* rod) { delete rod; }

mb_status mb_rod_segment_count(const mb_rod* rod, int32_t* count_out) {
    if (mb_status s = require(rod && count_out, "null pointer argument")) return s;
    *count_out = rod->rod.segment_count();
    return MB_OK;
}

mb_status mb_rod_segment_length(const mb_rod* rod, double* meters_out) {
    if (mb_status s = require(rod && meters_out, "null pointer argument")) return s;
    *meters_out = rod->rod.segment_length;
    return MB_OK;
}

mb_status mb_solve(const mb_rod* rod, double field_t, double field_angle_rad,
                   const mb_solve_options* opts, mb_equilibrium** out) {
    if (mb_status s = require(rod && out, "null pointer argument")) return s;
    return wrap([&] {
        *out = new mb_equilibrium{
            magbend::solve_equilibrium(rod->rod, field_t, field_angle_rad, to_cpp(opts))};
    });
}

void mb_equilibrium_free(mb_equilibrium* eq) { delete eq; }

mb_status mb_equilibrium_converged(const mb_equilibrium* eq, int32_t* flag_out) {
    if (mb_status s = require(eq && flag_out, "null pointer argument")) return s;
    *flag_out = eq->eq.converged ? 1 : 0;
    return MB_OK;
}

mb_status mb_equilibrium_angle_count(const mb_equilibrium* eq, int32_t* count_out) {
    if (mb_status s = require(eq && count_out, "null pointer argument")) return s;
    *count_out = static_cast<int32_t>(eq->eq.joint_angles.size());
    return MB_OK;
}

mb_status mb_equilibrium_angles(const mb_equilibrium* eq, double* buf, int32_t cap) {
    if (mb_status s = require(eq && buf, "null pointer argument")) return s;
    const auto& angles = eq->eq.joint_angles;
    if (mb_status s = require(cap >= static_cast<int32_t>(angles.size()),
                              "buffer too small for joint angles"))
        return s;
    std::memcpy(buf, angles.data(), angles.size() * sizeof(double));
    return MB_OK;
}

mb_status mb_equilibrium_centerline(const mb_equilibrium* eq, double* xy_interleaved,
                                    int32_t cap) {
    if (mb_status s = require(eq && xy_interleaved, "null pointer argument")) return s;
    const auto& pts = eq->eq.points;
    if (mb_status s = require(cap >= static_cast<int32_t>(2 * pts.size()),
                              "buffer too small for centerline"))
        return s;
    for (size_t i = 0; i < pts.size(); ++i) {
        xy_interleaved[2 * i] = pts[i].x;
        xy_interleaved[2 * i + 1] = pts[i].y;
    }
    return MB_OK;
}

mb_status mb_equilibrium_energies(const mb_equilibrium* eq, double* bending_j_out,
                                  double* zeeman_j_out) {
    if (mb_status s = require(eq && bending_j_out && zeeman_j_out, "null pointer argument"))
        return s;
    *bending_j_out = eq->eq.bending_energy;
    *zeeman_j_out = eq->eq.zeeman_energy;
    return MB_OK;
}

mb_status mb_equilibrium_gradient_norm(const mb_equilibrium* eq, double* norm_out) {
    if (mb_status s = require(eq && norm_out, "null pointer argument")) return s;
    *norm_out = eq->eq.gradient_norm;
    return MB_OK;
}

mb_status mb_equilibrium_to_json(const mb_equilibrium* eq, char** json_out) {
    if (mb_status s = require(eq && json_out, "null pointer argument")) return s;
    return wrap([&] { *json_out = dup_string(equilibrium_json(eq->eq)); });
}

mb_status mb_fit_quadratic(const double* xy, int32_t n_points, double* a_out, double* rms_out) {
    if (mb_status s = require(xy && a_out && rms_out, "null pointer argument")) return s;
    if (mb_status s = require(n_points >= 0, "negative point count")) return s;
    return wrap([&] {
        magbend::Curve2D curve;
        curve.points.reserve(n_points);
        for (int32_t i = 0; i < n_points; ++i)
            curve.points.push_back(magbend::Vec2{xy[2 * i], xy[2 * i + 1]});
        const auto fit = magbend::fit_quadratic(curve);
        *a_out = fit.a;
        *rms_out = fit.rms_residual;
    });
}

mb_status mb_bending_radius(const double* xy, int32_t n_points, double* radius_out) {
    if (mb_status s = require(xy && radius_out, "null pointer argument")) return s;
    if (mb_status s = require(n_points >= 0, "negative point count")) return s;
    return wrap([&] {
        magbend::Curve2D curve;
        curve.points.reserve(n_points);
        for (int32_t i = 0; i < n_points; ++i)
            curve.points.push_back(magbend::Vec2{xy[2 * i], xy[2 * i + 1]});
        *radius_out = magbend::bending_radius(curve);
    });
}

mb_status mb_curvature_profile(const mb_equilibrium* eq, double* buf, int32_t cap) {
    if (mb_status s = require(eq && buf, "null pointer argument")) return s;
    return wrap([&] {
        const std::vector<double> kappa = magbend::curvature_profile(eq->eq);
        if (cap < static_cast<int32_t>(kappa.size()))
            throw std::invalid_argument("buffer too small for curvature profile");
        std::memcpy(buf, kappa.data(), kappa.size() * sizeof(double));
    });
}

mb_status mb_polyline_curvature(const double* xy, int32_t n_points, double* buf, int32_t cap,
                                int32_t* n_out) {
    if (mb_status s = require(xy && buf && n_out, "null pointer argument")) return s;
    if (mb_status s = require(n_points >= 0, "negative point count")) return s;
    return wrap([&] {
        std::vector<magbend::Vec2> pts;
        pts.reserve(n_points);
        for (int32_t i = 0; i < n_points; ++i)
            pts.push_back(magbend::Vec2{xy[2 * i], xy[2 * i + 1]});
        const std::vector<double> kappa = magbend::polyline_curvature(pts);
        if (cap < static_cast<int32_t>(kappa.size()))
            throw std::invalid_argument("buffer too small for curvature values");
        std::memcpy(buf, kappa.data(), kappa.size() * sizeof(double));
        *n_out = static_cast<int32_t>(kappa.size());
    });
}

void mb_train_options_init(mb_train_options* opts) {
    if (opts == nullptr) return;
    opts->epochs = 5000;
    opts->learning_rate = 1e-3;
    opts->seed = 42;
}

mb_status mb_model_train_csv(const char* dataset_csv, double holdout_mt,
                             const mb_train_options* opts, mb_model** model_out,
                             char** report_json_out) {
    if (mb_status s = require(dataset_csv && model_out, "null pointer argument")) return s;
    return wrap([&] {
        mb_train_options defaults;
        mb_train_options_init(&defaults);
        const mb_train_options& o = opts != nullptr ? *opts : defaults;

        const auto dataset = magbend::dataset_from_csv(dataset_csv);
        std::vector<magbend::BendSample> train, test;
        magbend::split_holdout(dataset, holdout_mt * 1e-3, train, test);

        auto model = std::make_unique<mb_model>(mb_model{magbend::SurrogateModel(o.seed)});
        magbend::TrainOptions topts;
        topts.epochs = o.epochs;
        topts.learning_rate = o.learning_rate;
        const magbend::TrainReport report = model->model.train(train, topts, &test);

        if (report_json_out != nullptr) {
            nlohmann::ordered_json j;
            j["epochs"] = report.epochs;
            j["learning_rate"] = report.learning_rate;
            j["train_samples"] = train.size();
            j["test_samples"] = test.size();
            j["initial_train_l1"] = report.loss_history.front();
            j["final_train_l1"] = report.loss_history.back();
            j["final_train_mse_per_mm2"] = report.final_train_mse * 1e-6;
            j["test_mse_per_mm2"] = report.test_mse * 1e-6;
            j["test_mse_normalized"] = report.test_mse_normalized;
            *report_json_out = dup_string(j.dump(2) + "\n");
        }
        *model_out = model.release();
    });
}

mb_status mb_model_predict(const mb_model* model, double mt_t, const double e_pa[3],
                           const double l_m[3], double cs_m, double* a_out) {
    if (mb_status s = require(model && e_pa && l_m && a_out, "null pointer argument")) return s;
    return wrap([&] {
        *a_out = model->model.forward(mt_t, {e_pa[0], e_pa[1], e_pa[2]},
                                      {l_m[0], l_m[1], l_m[2]}, cs_m);
    });
}

mb_status mb_model_to_json(const mb_model* model, char** json_out) {
    if (mb_status s = require(model && json_out, "null pointer argument")) return s;
    return wrap([&] { *json_out = dup_string(model->model.to_json()); });
}

mb_status mb_model_from_json(const char* json, mb_model** model_out) {
    if (mb_status s = require(json && model_out, "null pointer argument")) return s;
    return wrap([&] {
        *model_out = new mb_model{magbend::SurrogateModel::from_json(json)};
    });
}

void mb_model_free(mb_model* model) { delete model; }

mb_status mb_sweep_run(const char* grid_json, const char* base_dir, int32_t threads,
                       char** records_json_out, int32_t* any_nonconverged_out) {
    if (mb_status s = require(grid_json && records_json_out, "null pointer argument")) return s;
    return wrap([&] {
        const magbend::SweepGrid grid =
            magbend::parse_sweep_config(grid_json, base_dir != nullptr ? base_dir : "");
        const auto records = magbend::run_sweep(grid, threads);
        if (any_nonconverged_out != nullptr) {
            *any_nonconverged_out = 0;
            for (const auto& r : records)
                if (!r.converged) *any_nonconverged_out = 1;
        }
        *records_json_out = dup_string(magbend::write_library_json(records));
    });
}

mb_status mb_library_to_csv(const char* records_json, char** csv_out) {
    if (mb_status s = require(records_json && csv_out, "null pointer argument")) return s;
    return wrap([&] {
        nlohmann::json arr;
        try {
            arr = nlohmann::json::parse(records_json);
        } catch (const nlohmann::json::exception& e) {
            throw magbend::io_error(std::string("records document is not valid JSON: ") +
                                    e.what());
        }
        if (!arr.is_array()) throw magbend::io_error("records document must be a JSON array");
        std::vector<magbend::LibraryRecord> records;
        for (const auto& rj : arr) {
            magbend::LibraryRecord r;
            r.spec_id = rj.at("spec").get<std::string>();
            r.field_mt = rj.at("field_mT").get<double>();
            r.angle_deg = rj.at("angle_deg").get<double>();
            const auto& a = rj.at("a_per_mm");
            r.a_per_mm = a.is_null() ? std::numeric_limits<double>::quiet_NaN()
                                     : a.get<double>();
            const auto& rad = rj.at("radius_mm");
            r.radius_mm = rad.is_null() ? std::numeric_limits<double>::infinity()
                                        : rad.get<double>();
            r.converged = rj.at("converged").get<bool>();
            r.iterations = rj.at("iterations").get<int>();
            records.push_back(std::move(r));
        }
        *csv_out = dup_string(magbend::write_library_csv(records));
    });
}

mb_status mb_dataset_generate(const char* grid_json, const char* base_dir, char** csv_out) {
    if (mb_status s = require(grid_json && csv_out, "null pointer argument")) return s;
    return wrap([&] {
        const magbend::SweepGrid grid =
            magbend::parse_sweep_config(grid_json, base_dir != nullptr ? base_dir : "");
        *csv_out = dup_string(magbend::dataset_csv_from_grid(grid));
    });
}

mb_status mb_render_svg(const char* curves_json, int32_t width_px, int32_t height_px,
                        const char* title, char** svg_out) {
    if (mb_status s = require(curves_json && svg_out, "null pointer argument")) return s;
    return wrap([&] {
        nlohmann::json arr;
        try {
            arr = nlohmann::json::parse(curves_json);
        } catch (const nlohmann::json::exception& e) {
            throw magbend::io_error(std::string("curves document is not valid JSON: ") +
                                    e.what());
        }
        if (!arr.is_array())
            throw magbend::io_error("curves document must be a JSON array");
        std::vector<magbend::LabeledCurve> curves;
        for (const auto& cj : arr) {
            magbend::LabeledCurve lc;
            lc.label = cj.value("label", "curve" + std::to_string(curves.size()));
            for (const auto& pj : cj.at("points_mm"))
                lc.curve.points.push_back(
                    magbend::Vec2{pj.at(0).get<double>() * 1e-3, pj.at(1).get<double>() * 1e-3});
            curves.push_back(std::move(lc));
        }
        magbend::SvgOptions opts;
        if (width_px > 0) opts.width_px = width_px;
        if (height_px > 0) opts.height_px = height_px;
        if (title != nullptr) opts.title = title;
        *svg_out = dup_string(magbend::render_svg(curves, opts));
    });
}

mb_status mb_pgm_read(const char* path, uint8_t** pixels_out, int32_t* width_out,
                      int32_t* height_out) {
    if (mb_status s = require(path && pixels_out && width_out && height_out,
                              "null pointer argument"))
        return s;
    return wrap([&] {
        const magbend::GrayImage img = magbend::read_pgm(path);
        auto* buf = new uint8_t[img.pixels.size()];
        std::memcpy(buf, img.pixels.data(), img.pixels.size());
        *pixels_out = buf;
        *width_out = img.width;
        *height_out = img.height;
    });
}

mb_status mb_extract_centerline(const uint8_t* pixels, int32_t width, int32_t height,
                                int32_t threshold, char axis, double mm_per_pixel,
                                double** xy_mm_out, int32_t* n_points_out) {
    if (mb_status s = require(pixels && xy_mm_out && n_points_out, "null pointer argument"))
        return s;
    if (mb_status s = require(axis == 'x' || axis == 'y', "axis must be 'x' or 'y'")) return s;
    return wrap([&] {
        magbend::GrayImage img;
        img.width = width;
        img.height = height;
        img.mm_per_pixel = mm_per_pixel;
        if (width <= 0 || height <= 0)
            throw std::invalid_argument("image dimensions must be positive");
        img.pixels.assign(pixels, pixels + static_cast<size_t>(width) * height);
        const magbend::Curve2D curve = magbend::extract_centerline(
            img, threshold, axis == 'x' ? magbend::ScanAxis::x : magbend::ScanAxis::y);
        auto* buf = new double[curve.points.size() * 2];
        for (size_t i = 0; i < curve.points.size(); ++i) {
            buf[2 * i] = curve.points[i].x * 1e3;
            buf[2 * i + 1] = curve.points[i].y * 1e3;
        }
        *xy_mm_out = buf;
        *n_points_out = static_cast<int32_t>(curve.points.size());
    });
}

}  // extern "C"
