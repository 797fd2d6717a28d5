#pragma once

// Parameter sweeps over (spec, field, angle) grids and the bending-library
// documents they produce. Grid configs are JSON; see parse_sweep_config.

#include <string>
#include <vector>

#include "magbend/curve.hpp"
#include "magbend/solver.hpp"
#include "magbend/surrogate.hpp"

namespace magbend {

struct SweepGrid {
    std::vector<RodSpec> specs;
    std::vector<double> fields;  // T
    std::vector<double> angles;  // rad
    double segments_per_mm = 2.0;
    SolverOptions solver;
};

struct LibraryRecord {
    std::string spec_id;
    double field_mt = 0.0;
    double angle_deg = 0.0;
    double a_per_mm = 0.0;      // NaN when the solve did not converge
    double radius_mm = 0.0;     // +inf sentinel for straight curves
    bool converged = false;
    int iterations = 0;
};

// Config schema:
//   {"specs": [<path>|<inline spec object>, ...],
//    "fields_mT": [...],                 required, non-empty
//    "angles_deg": [...],                optional, default [90]
//    "resolution": 2.0,                  optional, segments per mm
//    "solver": {"continuation_steps":…, "tolerance":…, "max_iters":…}}  optional
// Relative spec paths resolve against base_dir when given.
SweepGrid parse_sweep_config(const std::string& text, const std::string& base_dir = "");

// One record per grid point in (spec, field, angle) order; non-converged
// points are flagged, never dropped. threads > 1 runs grid points
// concurrently; ordering is by grid index either way.
std::vector<LibraryRecord> run_sweep(const SweepGrid& grid, int threads = 1);

// Byte-deterministic documents: fixed column order, 9 significant digits,
// LF line endings. JSON stores non-finite numbers as null.
std::string write_library_csv(const std::vector<LibraryRecord>& records);
std::string write_library_json(const std::vector<LibraryRecord>& records);

// Dataset CSV for surrogate training from the same grid (angles ignored;
// samples are solved at the default 90 degree field angle).
std::string dataset_csv_from_grid(const SweepGrid& grid, int* excluded = nullptr);

}  // namespace magbend
