#include "magbend/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <thread>

#include <json.hpp>

#include "magbend/errors.hpp"
#include "magbend/spec_io.hpp"

namespace magbend {

namespace {

std::string fmt9(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

}  // namespace

SweepGrid parse_sweep_config(const std::string& text, const std::string& base_dir) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw config_error(std::string("sweep config is not valid JSON: ") + e.what());
    }
    try {
        SweepGrid grid;
        const auto& specs = j.at("specs");
        if (!specs.is_array() || specs.empty())
            throw config_error("sweep config: 'specs' must be a non-empty array");
        for (const auto& entry : specs) {
            if (entry.is_string()) {
                std::filesystem::path p = entry.get<std::string>();
                if (p.is_relative() && !base_dir.empty())
                    p = std::filesystem::path(base_dir) / p;
                grid.specs.push_back(rod_spec_from_file(p.string()));
            } else if (entry.is_object()) {
                grid.specs.push_back(rod_spec_from_json(entry.dump()));
            } else {
                throw config_error("sweep config: spec entries must be paths or objects");
            }
        }
        const auto& fields = j.at("fields_mT");
        if (!fields.is_array() || fields.empty())
            throw config_error("sweep config: 'fields_mT' must be a non-empty array");
        for (const auto& f : fields) {
            const double mt = f.get<double>();
            if (!std::isfinite(mt) || mt < 0.0)
                throw config_error("sweep config: field strengths must be finite and >= 0");
            grid.fields.push_back(mt * 1e-3);
        }
        if (j.contains("angles_deg")) {
            const auto& angles = j.at("angles_deg");
            if (!angles.is_array() || angles.empty())
                throw config_error("sweep config: 'angles_deg' must be a non-empty array");
            for (const auto& a : angles)
                grid.angles.push_back(a.get<double>() * std::numbers::pi / 180.0);
        } else {
            grid.angles.push_back(std::numbers::pi / 2.0);
        }
        grid.segments_per_mm = j.value("resolution", 2.0);
        if (!(grid.segments_per_mm > 0.0))
            throw config_error("sweep config: 'resolution' must be > 0");
        if (j.contains("solver")) {
            const auto& s = j.at("solver");
            grid.solver.continuation_steps = s.value("continuation_steps", 20);
            grid.solver.tolerance = s.value("tolerance", 1e-10);
            grid.solver.max_iters = s.value("max_iters", 500);
        }
        return grid;
    } catch (const nlohmann::json::exception& e) {
        throw config_error(std::string("sweep config: missing or mistyped field: ") + e.what());
    }
}

std::vector<LibraryRecord> run_sweep(const SweepGrid& grid, int threads) {
    if (grid.specs.empty() || grid.fields.empty() || grid.angles.empty())
        throw config_error("run_sweep: grid has an empty dimension");

    // All failures below this point are per-point and flagged, not thrown;
    // resolve everything configuration-like up front.
    std::vector<DiscreteRod> rods;
    rods.reserve(grid.specs.size());
    for (const RodSpec& spec : grid.specs) rods.push_back(build_rod(spec, grid.segments_per_mm));

    const size_t nf = grid.fields.size(), na = grid.angles.size();
    const size_t total = grid.specs.size() * nf * na;
    std::vector<LibraryRecord> records(total);

    auto work = [&](size_t idx) {
        const size_t spec_i = idx / (nf * na);
        const size_t field_i = (idx / na) % nf;
        const size_t angle_i = idx % na;
        const RodSpec& spec = grid.specs[spec_i];

        LibraryRecord rec;
        rec.spec_id = spec.name.empty() ? ("spec" + std::to_string(spec_i)) : spec.name;
        rec.field_mt = grid.fields[field_i] * 1e3;
        rec.angle_deg = grid.angles[angle_i] * 180.0 / std::numbers::pi;

        const Equilibrium eq =
            solve_equilibrium(rods[spec_i], grid.fields[field_i], grid.angles[angle_i], grid.solver);
        rec.converged = eq.converged;
        rec.iterations = eq.iterations;
        try {
            const Curve2D curve{eq.points, CurveSource::simulation};
            rec.a_per_mm = fit_quadratic(curve).a * 1e-3;
            rec.radius_mm = bending_radius(curve) * 1e3;
        } catch (const std::exception&) {
            rec.a_per_mm = std::numeric_limits<double>::quiet_NaN();
            rec.radius_mm = std::numeric_limits<double>::quiet_NaN();
        }
        if (!eq.converged) rec.a_per_mm = std::numeric_limits<double>::quiet_NaN();
        records[idx] = std::move(rec);
    };

    if (threads <= 1) {
        for (size_t i = 0; i < total; ++i) work(i);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        const int n = std::min<int>(threads, static_cast<int>(total));
        pool.reserve(n);
        for (int t = 0; t < n; ++t)
            pool.emplace_back([&] {
                for (size_t i = next.fetch_add(1); i < total; i = next.fetch_add(1)) work(i);
            });
        for (std::thread& t : pool) t.join();
    }
    return records;
}

std::string write_library_csv(const std::vector<LibraryRecord>& records) {
    if (records.empty()) throw std::invalid_argument("write_library_csv: no records");
    std::string out = "spec,field_mT,angle_deg,a_per_mm,radius_mm,converged,iterations\n";
    for (const LibraryRecord& r : records) {
        out += r.spec_id;
        out += ',';
        out += fmt9(r.field_mt);
        out += ',';
        out += fmt9(r.angle_deg);
        out += ',';
        out += fmt9(r.a_per_mm);
        out += ',';
        out += fmt9(r.radius_mm);
        out += ',';
        out += r.converged ? '1' : '0';
        out += ',';
        out += std::to_string(r.iterations);
        out += '\n';
    }
    return out;
}

std::string write_library_json(const std::vector<LibraryRecord>& records) {
    if (records.empty()) throw std::invalid_argument("write_library_json: no records");
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const LibraryRecord& r : records) {
        nlohmann::ordered_json rec;
        rec["spec"] = r.spec_id;
        rec["field_mT"] = r.field_mt;
        rec["angle_deg"] = r.angle_deg;
        rec["a_per_mm"] = r.a_per_mm;      // null when non-finite
        rec["radius_mm"] = r.radius_mm;    // null for the straight-line sentinel
        rec["converged"] = r.converged;
        rec["iterations"] = r.iterations;
        arr.push_back(rec);
    }
    return arr.dump(2) + "\n";
}

std::string dataset_csv_from_grid(const SweepGrid& grid, int* excluded) {
    const std::vector<BendSample> samples =
        build_dataset(grid.specs, grid.fields, grid.segments_per_mm, grid.solver, excluded);
    return dataset_to_csv(samples);
}

}  // namespace magbend
