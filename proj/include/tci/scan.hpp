#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tci/eigensolve.hpp"
#include "tci/lattice.hpp"
#include "tci/operators.hpp"

namespace tci::scan {

struct GridSpec {
    std::vector<double> values;   // explicit, or generated from start/stop
    static GridSpec list(std::vector<double> v) { return {std::move(v)}; }
    static GridSpec linear(double start, double stop, int count);
    static GridSpec logspace(double start, double stop, int count);
};

enum class Observable { Spectrum, StructureFactors, Fidelity, TotalSpin, MappingCheck };

struct RunConfig {
    int version = 1;
    LatticeSpec lattice;
    ModelParams model;
    GridSpec j2_over_j1;
    GridSpec lambda_bar;
    SectorLabel sector;
    std::set<Observable> observables{Observable::Spectrum};
    EigenRequest eigen;
    std::optional<double> delta_lambda;   // default 1e-3 x grid spacing
    int mapping_levels = 5;
    std::string output_dir = "out";
    uint64_t seed = 12345;

    static RunConfig from_json_file(const std::filesystem::path& path);
    static RunConfig from_json_text(const std::string& text);
    std::string to_json_text() const;
};

// Validation errors (empty when the config is well-formed).
std::vector<std::string> check_config(const std::string& json_text);

struct PointResult {
    int i_j2 = 0, i_lambda = 0;
    bool ok = false;
    std::string record_path;
    std::string error;
};

struct ScanOutcome {
    std::vector<PointResult> points;
    int n_run = 0, n_skipped = 0, n_failed = 0;
};

// One JSON record per grid point under <output_dir>/records/; existing
// records are skipped unless force is set. Grid points are independent;
// `workers` of them run concurrently.
ScanOutcome run_scan(const RunConfig& config, bool force = false, int workers = 1);

enum class Figure { PhasePanels, SpectrumPairs };

// Plot-ready CSV matrices (rows = lambda-bar grid, cols = J2/J1 grid) plus a
// fidelity-peaks file; SpectrumPairs emits paired TCI/Heisenberg levels.
std::vector<std::string> emit_plotdata(const std::filesystem::path& records_dir, Figure figure,
                                       const std::filesystem::path& out_dir);

// Environment override for relative output directories.
std::filesystem::path resolve_output_dir(const std::string& dir);

} // namespace tci::scan
