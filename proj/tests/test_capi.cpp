#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <algorithm>
#include <cstring>
#include <string>
#include <vector>

#include "magbend/magbend.h"

namespace {

const char* kSpecJson = R"({
  "name": "capi2",
  "sections": [
    {"length_mm": 10, "e_MPa": 20},
    {"length_mm": 10, "e_MPa": 15},
    {"length_mm": 10, "e_MPa": 10}
  ],
  "side_mm": 0.97,
  "residual_flux_mT": 20.07
})";

std::string tiny_dataset_csv() {
    // Two parameter groups, three fields each; smooth synthetic targets.
    std::string csv = "mt_mT,e1_MPa,e2_MPa,e3_MPa,l1_mm,l2_mm,l3_mm,cs_mm,a_per_mm\n";
    for (int g = 0; g < 2; ++g) {
        for (int f = 1; f <= 3; ++f) {
            const double cs = 0.9 + 0.1 * g;
            const double a = 0.001 * f / cs;
            csv += std::to_string(10 * f) + "," + std::to_string(20 - g) + "," +
                   std::to_string(15 - g) + "," + std::to_string(10 - g) + ",10,10,10," +
                   std::to_string(cs) + "," + std::to_string(a) + "\n";
        }
    }
    return csv;
}

}  // namespace

TEST_CASE("c api field functions and error reporting") {
    double h = 0.0, b = 0.0;
    REQUIRE(mb_field_axial(0.055, 1.3578, 0.070, 32, &h, &b) == MB_OK);
    CHECK(b == doctest::Approx(0.038).epsilon(0.005));
    double hc = 0.0, bc = 0.0;
    REQUIRE(mb_field_axial_closed_form(0.055, 1.3578, 0.070, &hc, &bc) == MB_OK);
    CHECK(std::abs(b - bc) / bc < 1e-4);

    double br = 0.0;
    REQUIRE(mb_field_calibrate(0.055, 0.070, 0.038, 32, &br) == MB_OK);
    CHECK(br == doctest::Approx(1.3578).epsilon(0.005));

    // Interior point: domain error with a message.
    CHECK(mb_field_axial(0.055, 1.0, -0.040, 32, &h, &b) == MB_ERR_DOMAIN);
    CHECK(std::strlen(mb_last_error()) > 0);
    CHECK(mb_field_axial(0.055, 1.0, 0.070, 32, nullptr, &b) == MB_ERR_ARGUMENT);
    CHECK(std::string(mb_status_name(MB_ERR_DOMAIN)) == "domain error");

    double bx = 0.0, by = 0.0;
    REQUIRE(mb_field_uniform(0.038, std::acos(-1.0) / 3, &bx, &by) == MB_OK);
    CHECK(bx == doctest::Approx(0.019).epsilon(1e-9));
}

TEST_CASE("c api rod and equilibrium round trip") {
    mb_rod* rod = nullptr;
    REQUIRE(mb_rod_from_json(kSpecJson, 2.0, &rod) == MB_OK);
    int32_t n = 0;
    REQUIRE(mb_rod_segment_count(rod, &n) == MB_OK);
    CHECK(n == 60);
    double seg = 0.0;
    REQUIRE(mb_rod_segment_length(rod, &seg) == MB_OK);
    CHECK(seg == doctest::Approx(0.5e-3));

    mb_equilibrium* eq = nullptr;
    REQUIRE(mb_solve(rod, 0.050, std::acos(-1.0) / 2, nullptr, &eq) == MB_OK);
    int32_t converged = 0;
    REQUIRE(mb_equilibrium_converged(eq, &converged) == MB_OK);
    CHECK(converged == 1);

    int32_t count = 0;
    REQUIRE(mb_equilibrium_angle_count(eq, &count) == MB_OK);
    CHECK(count == 60);
    std::vector<double> angles(count);
    REQUIRE(mb_equilibrium_angles(eq, angles.data(), count) == MB_OK);
    CHECK(angles.back() > 0.1);
    CHECK(mb_equilibrium_angles(eq, angles.data(), 3) == MB_ERR_ARGUMENT);

    std::vector<double> xy(2 * (count + 1));
    REQUIRE(mb_equilibrium_centerline(eq, xy.data(), static_cast<int32_t>(xy.size())) == MB_OK);
    CHECK(xy[0] == 0.0);
    CHECK(xy[1] == 0.0);

    double ub = 0.0, uz = 0.0, gnorm = 1.0;
    REQUIRE(mb_equilibrium_energies(eq, &ub, &uz) == MB_OK);
    CHECK(ub > 0.0);
    CHECK(uz < 0.0);
    REQUIRE(mb_equilibrium_gradient_norm(eq, &gnorm) == MB_OK);
    CHECK(gnorm < 1e-10);

    char* json = nullptr;
    REQUIRE(mb_equilibrium_to_json(eq, &json) == MB_OK);
    CHECK(std::string(json).find("\"converged\": true") != std::string::npos);
    mb_string_free(json);

    // Curve helpers against the solved centerline.
    double a = 0.0, rms = 0.0, radius = 0.0;
    REQUIRE(mb_fit_quadratic(xy.data(), count + 1, &a, &rms) == MB_OK);
    CHECK(a > 0.0);
    REQUIRE(mb_bending_radius(xy.data(), count + 1, &radius) == MB_OK);
    CHECK(radius > 0.0);
    std::vector<double> kappa(count);
    REQUIRE(mb_curvature_profile(eq, kappa.data(), count) == MB_OK);
    CHECK(kappa.front() > 0.0);

    mb_equilibrium_free(eq);
    mb_rod_free(rod);

    mb_rod* bad = nullptr;
    CHECK(mb_rod_from_json("{\"nope\":1}", 2.0, &bad) == MB_ERR_CONFIG);
    CHECK(bad == nullptr);
}

TEST_CASE("c api surrogate train, predict, serialize") {
    const std::string csv = tiny_dataset_csv();
    mb_train_options topts;
    mb_train_options_init(&topts);
    CHECK(topts.epochs == 5000);
    topts.epochs = 200;

    mb_model* model = nullptr;
    char* report = nullptr;
    REQUIRE(mb_model_train_csv(csv.c_str(), 20.0, &topts, &model, &report) == MB_OK);
    REQUIRE(model != nullptr);
    CHECK(std::string(report).find("\"test_samples\": 2") != std::string::npos);
    mb_string_free(report);

    const double e[3] = {20e6, 15e6, 10e6};
    const double l[3] = {10e-3, 10e-3, 10e-3};
    double a = 0.0;
    REQUIRE(mb_model_predict(model, 0.020, e, l, 0.9e-3, &a) == MB_OK);
    CHECK(std::isfinite(a));

    char* mjson = nullptr;
    REQUIRE(mb_model_to_json(model, &mjson) == MB_OK);
    mb_model* loaded = nullptr;
    REQUIRE(mb_model_from_json(mjson, &loaded) == MB_OK);
    double a2 = 0.0;
    REQUIRE(mb_model_predict(loaded, 0.020, e, l, 0.9e-3, &a2) == MB_OK);
    CHECK(a2 == a);
    mb_string_free(mjson);
    mb_model_free(loaded);
    mb_model_free(model);

    mb_model* bad = nullptr;
    CHECK(mb_model_from_json("{}", &bad) == MB_ERR_IO);
    CHECK(mb_model_train_csv(csv.c_str(), 99.0, &topts, &model, nullptr) == MB_ERR_ARGUMENT);
}

TEST_CASE("c api sweep, library csv, dataset generation") {
    std::string grid = "{\"specs\":[";
    grid += kSpecJson;
    grid += "],\"fields_mT\":[20,40]}";

    char* records = nullptr;
    int32_t nonconv = -1;
    REQUIRE(mb_sweep_run(grid.c_str(), nullptr, 2, &records, &nonconv) == MB_OK);
    CHECK(nonconv == 0);
    char* csv = nullptr;
    REQUIRE(mb_library_to_csv(records, &csv) == MB_OK);
    const std::string csv_text(csv);
    CHECK(csv_text.rfind("spec,field_mT,angle_deg,a_per_mm,radius_mm,converged,iterations\n",
                         0) == 0);
    CHECK(std::count(csv_text.begin(), csv_text.end(), '\n') == 3);
    mb_string_free(csv);
    mb_string_free(records);

    char* dataset = nullptr;
    REQUIRE(mb_dataset_generate(grid.c_str(), nullptr, &dataset) == MB_OK);
    CHECK(std::string(dataset).find("mt_mT,") == 0);
    mb_string_free(dataset);

    CHECK(mb_sweep_run("{\"specs\":[],\"fields_mT\":[1]}", nullptr, 1, &records, nullptr) ==
          MB_ERR_CONFIG);
}

TEST_CASE("c api svg and extraction") {
    const char* curves = R"([{"label":"demo","points_mm":[[0,0],[5,0.5],[10,2.0]]}])";
    char* svg = nullptr;
    REQUIRE(mb_render_svg(curves, 640, 480, "demo plot", &svg) == MB_OK);
    CHECK(std::string(svg).find("<polyline") != std::string::npos);
    mb_string_free(svg);

    // 20x10 image with a flat bar in rows 4..5.
    std::vector<uint8_t> pixels(20 * 10, 255);
    for (int col = 0; col < 20; ++col) {
        pixels[4 * 20 + col] = 0;
        pixels[5 * 20 + col] = 0;
    }
    double* xy = nullptr;
    int32_t n = 0;
    REQUIRE(mb_extract_centerline(pixels.data(), 20, 10, 128, 'x', 0.1, &xy, &n) == MB_OK);
    CHECK(n == 20);
    CHECK(xy[0] == 0.0);
    CHECK(xy[2 * 19] == doctest::Approx(1.9));  // mm
    mb_buffer_free(xy);

    CHECK(mb_extract_centerline(pixels.data(), 20, 10, 128, 'q', 0.1, &xy, &n) ==
          MB_ERR_ARGUMENT);
    std::fill(pixels.begin(), pixels.end(), 255);
    CHECK(mb_extract_centerline(pixels.data(), 20, 10, 128, 'x', 0.1, &xy, &n) ==
          MB_ERR_EXTRACTION);

    uint8_t* img = nullptr;
    int32_t w = 0, h = 0;
    CHECK(mb_pgm_read("/nonexistent.pgm", &img, &w, &h) == MB_ERR_IO);
}
