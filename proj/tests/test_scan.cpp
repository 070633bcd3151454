#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "tci/scan.hpp"

using namespace tci;
using namespace tci::scan;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               fs::path("tci_scan_test_" + std::to_string(::getpid()) + "_" +
                        std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

RunConfig two_spin_config(const fs::path& out) {
    RunConfig cfg;
    cfg.lattice.kind = LatticeKind::Chain;
    cfg.lattice.t1 = {2, 0};
    cfg.lattice.t2 = {0, 1};
    cfg.lattice.include_j2 = false;
    cfg.model.variant = ModelVariant::TCI;
    cfg.model.j1 = 0.5;   // bond multiplicity 2 on the 2-site chain
    cfg.model.rescaled = false;
    cfg.j2_over_j1 = GridSpec::list({0.0});
    cfg.lambda_bar = GridSpec::list({1.0});
    cfg.observables = {Observable::Spectrum};
    cfg.eigen.n_eigenpairs = 2;
    cfg.output_dir = out.string();
    return cfg;
}

} // namespace

TEST_CASE("config round-trips losslessly") {
    RunConfig cfg;
    cfg.lattice.kind = LatticeKind::Kagome;
    cfg.lattice.t1 = {2, 0};
    cfg.lattice.t2 = {0, 2};
    cfg.j2_over_j1 = GridSpec::list({0.0, 0.1});
    cfg.lambda_bar = GridSpec::logspace(0.01, 1.0, 5);
    cfg.sector.two_m = 0;
    cfg.observables = {Observable::Spectrum, Observable::Fidelity};
    cfg.seed = 99;
    const std::string text = cfg.to_json_text();
    const RunConfig back = RunConfig::from_json_text(text);
    CHECK(back.to_json_text() == text);
    CHECK(check_config(text).empty());
}

TEST_CASE("check-config reports problems") {
    CHECK_FALSE(check_config("{not json").empty());
    CHECK_FALSE(check_config("{}").empty());
    // bad sector
    json j = json::parse(RunConfig{}.to_json_text());
    j["lattice"] = {{"kind", "square"}, {"t1", {2, 0}}, {"t2", {0, 2}}};
    j["grid"] = {{"j2_over_j1", {0.0}}, {"lambda_bar", {0.1}}};
    j["sector"] = {{"two_m", 1}};
    CHECK_FALSE(check_config(j.dump()).empty());
}

TEST_CASE("two-spin scan produces the analytic record") {
    TempDir tmp;
    auto cfg = two_spin_config(tmp.path / "out");
    const auto outcome = run_scan(cfg);
    CHECK(outcome.n_run == 1);
    CHECK(outcome.n_failed == 0);

    std::ifstream in(tmp.path / "out" / "records" / "p_0_0.json");
    REQUIRE(in.good());
    json rec;
    in >> rec;
    const auto evs = rec.at("eigenvalues").get<std::vector<double>>();
    REQUIRE(evs.size() == 2);
    CHECK(evs[0] == doctest::Approx(-0.25).epsilon(1e-10));
    CHECK(evs[1] == doctest::Approx(1.75).epsilon(1e-10));
    CHECK(rec.at("converged").get<bool>());
    CHECK(rec.contains("provenance"));
    CHECK(rec.at("provenance").contains("seed"));
}

TEST_CASE("resume skips existing records unless forced") {
    TempDir tmp;
    auto cfg = two_spin_config(tmp.path / "out");
    (void)run_scan(cfg);
    const auto second = run_scan(cfg);
    CHECK(second.n_run == 0);
    CHECK(second.n_skipped == 1);
    const auto forced = run_scan(cfg, /*force=*/true);
    CHECK(forced.n_run == 1);
}

TEST_CASE("determinism: identical config and seed give identical records") {
    TempDir tmp;
    auto cfg_a = two_spin_config(tmp.path / "a");
    auto cfg_b = two_spin_config(tmp.path / "b");
    (void)run_scan(cfg_a);
    (void)run_scan(cfg_b);
    json ra, rb;
    std::ifstream(tmp.path / "a" / "records" / "p_0_0.json") >> ra;
    std::ifstream(tmp.path / "b" / "records" / "p_0_0.json") >> rb;
    ra.erase("provenance");
    rb.erase("provenance");   // timestamps differ
    CHECK(ra.dump() == rb.dump());
}

TEST_CASE("failed points are recorded in-band and the scan continues") {
    TempDir tmp;
    auto cfg = two_spin_config(tmp.path / "out");
    cfg.model.allow_ferromagnetic = false;
    cfg.j2_over_j1 = GridSpec::list({-2.0, 0.0});   // first point violates the AF guard
    const auto outcome = run_scan(cfg);
    CHECK(outcome.n_failed == 1);
    CHECK(outcome.n_run == 1);
    json bad;
    std::ifstream(tmp.path / "out" / "records" / "p_0_0.json") >> bad;
    CHECK(bad.contains("error"));
}

TEST_CASE("emit produces matrices, peaks and spectrum pairs") {
    TempDir tmp;
    // synthetic records on a 2 x 5 grid with an injected chi_F bump
    const fs::path records = tmp.path / "records";
    fs::create_directories(records);
    const std::vector<double> lams = {0.1, 0.2, 0.3, 0.4, 0.5};
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 5; ++j) {
            json rec;
            rec["params"] = {{"j2_over_j1", 0.1 * i}, {"lambda", lams[j]}};
            const double peak_pos = 0.3;
            const double x = (lams[j] - peak_pos) / 0.05;
            rec["fidelity"] = {{"chi_f", 1.0 + 10.0 * std::exp(-x * x)},
                               {"delta_lambda", 1e-4},
                               {"degenerate", false}};
            rec["structure_factors"] = {
                {"zz", {{"values", {0.1}}, {"star", {{"M", 1.0 + i + j}, {"Gamma", 0.2}}}}},
                {"xx", {{"values", {0.1}}, {"star", {{"M", 0.5}, {"Gamma", 0.2}}}}}};
            rec["mapping_check"] = {{"tci", {-1.0, -0.5}},
                                    {"heisenberg_singlet", {-1.001, -0.502}},
                                    {"differences", {0.001, 0.002}},
                                    {"tolerance", 0.01}};
            std::ofstream out(records / ("p_" + std::to_string(i) + "_" + std::to_string(j) +
                                         ".json"));
            out << rec.dump();
        }
    }
    const auto files = emit_plotdata(records, Figure::PhasePanels, tmp.path / "plots");
    CHECK(files.size() >= 2);
    // csv matrix shape: header + one row per lambda
    std::ifstream chi(tmp.path / "plots" / "chi_f.csv");
    REQUIRE(chi.good());
    std::string line;
    int rows = 0;
    std::getline(chi, line);
    CHECK(line == "lambda_bar,0,0.1");
    while (std::getline(chi, line)) ++rows;
    CHECK(rows == 5);
    // single injected peak recovered near 0.3 for each column
    std::ifstream peaks(tmp.path / "plots" / "chi_f_peaks.csv");
    REQUIRE(peaks.good());
    std::getline(peaks, line);   // header
    int n_peaks = 0;
    while (std::getline(peaks, line)) {
        ++n_peaks;
        std::stringstream ss(line);
        std::string j2s, lams;
        std::getline(ss, j2s, ',');
        std::getline(ss, lams, ',');
        CHECK(std::stod(lams) == doctest::Approx(0.3).epsilon(0.05));
    }
    CHECK(n_peaks == 2);

    const auto spec_files = emit_plotdata(records, Figure::SpectrumPairs, tmp.path / "plots");
    REQUIRE(spec_files.size() == 1);
    std::ifstream pairs(spec_files[0]);
    std::getline(pairs, line);
    CHECK(line == "j2_over_j1,lambda_bar,level,tci,heisenberg_singlet,difference");
    rows = 0;
    while (std::getline(pairs, line)) ++rows;
    CHECK(rows == 2 * 5 * 2);
}

TEST_CASE("emit rejects incomplete grids and lists missing points") {
    TempDir tmp;
    const fs::path records = tmp.path / "records";
    fs::create_directories(records);
    for (int j = 0; j < 2; ++j) {
        json rec;
        rec["params"] = {{"j2_over_j1", j * 0.1}, {"lambda", j == 0 ? 0.1 : 0.2}};
        rec["fidelity"] = {{"chi_f", 1.0}, {"delta_lambda", 1e-4}, {"degenerate", false}};
        std::ofstream out(records / ("p_" + std::to_string(j) + "_0.json"));
        out << rec.dump();
    }
    try {
        (void)emit_plotdata(records, Figure::PhasePanels, tmp.path / "plots");
        FAIL("expected IncompleteGrid");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::IncompleteGrid);
        CHECK(std::string(e.what()).find("missing") != std::string::npos);
    }
}

TEST_CASE("output root override") {
    TempDir tmp;
    ::setenv("TCI_OUTPUT_ROOT", tmp.path.c_str(), 1);
    const auto resolved = resolve_output_dir("rel/dir");
    ::unsetenv("TCI_OUTPUT_ROOT");
    CHECK(resolved == tmp.path / "rel/dir");
    CHECK(resolve_output_dir("/abs/dir") == fs::path("/abs/dir"));
}

TEST_CASE("workers split the grid with identical results") {
    TempDir tmp;
    auto cfg = two_spin_config(tmp.path / "par");
    cfg.lambda_bar = GridSpec::list({0.5, 1.0, 1.5, 2.0});
    const auto outcome = run_scan(cfg, false, 3);
    CHECK(outcome.n_run == 4);
    auto cfg_serial = two_spin_config(tmp.path / "ser");
    cfg_serial.lambda_bar = GridSpec::list({0.5, 1.0, 1.5, 2.0});
    (void)run_scan(cfg_serial, false, 1);
    for (int j = 0; j < 4; ++j) {
        json a, b;
        std::ifstream(tmp.path / "par" / "records" / ("p_0_" + std::to_string(j) + ".json")) >> a;
        std::ifstream(tmp.path / "ser" / "records" / ("p_0_" + std::to_string(j) + ".json")) >> b;
        CHECK(a.at("eigenvalues").dump() == b.at("eigenvalues").dump());
    }
}
