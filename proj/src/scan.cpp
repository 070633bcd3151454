#include "tci/scan.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "tci/errors.hpp"
#include "tci/observables.hpp"
#include "tci/version.hpp"

namespace tci::scan {

namespace fs = std::filesystem;
using nlohmann::json;

GridSpec GridSpec::linear(double start, double stop, int count) {
    require(count >= 1, ErrorCode::InvalidArgument, "grid count must be >= 1");
    GridSpec g;
    for (int i = 0; i < count; ++i)
        g.values.push_back(count == 1 ? start : start + (stop - start) * i / (count - 1));
    return g;
}

GridSpec GridSpec::logspace(double start, double stop, int count) {
    require(start > 0 && stop > 0, ErrorCode::InvalidArgument, "log grid needs positive bounds");
    auto lin = linear(std::log(start), std::log(stop), count);
    for (auto& v : lin.values) v = std::exp(v);
    return lin;
}

namespace {

const std::map<std::string, Observable> kObservableNames = {
    {"spectrum", Observable::Spectrum},
    {"structure_factors", Observable::StructureFactors},
    {"fidelity", Observable::Fidelity},
    {"total_spin", Observable::TotalSpin},
    {"mapping_check", Observable::MappingCheck},
};

GridSpec grid_from_json(const json& j) {
    if (j.is_array()) return GridSpec::list(j.get<std::vector<double>>());
    require(j.is_object(), ErrorCode::InvalidArgument, "grid must be a list or object");
    const bool log = j.value("log", false);
    return log ? GridSpec::logspace(j.at("start"), j.at("stop"), j.at("count"))
               : GridSpec::linear(j.at("start"), j.at("stop"), j.at("count"));
}

json grid_to_json(const GridSpec& g) { return json(g.values); }

} // namespace

RunConfig RunConfig::from_json_text(const std::string& text) {
    const json j = json::parse(text);
    RunConfig c;
    c.version = j.value("version", 1);
    const auto& jl = j.at("lattice");
    c.lattice.kind = lattice_kind_from_string(jl.at("kind"));
    c.lattice.t1 = {jl.at("t1")[0].get<int>(), jl.at("t1")[1].get<int>()};
    c.lattice.t2 = {jl.at("t2")[0].get<int>(), jl.at("t2")[1].get<int>()};
    if (j.contains("model")) {
        const auto& jm = j.at("model");
        c.model.variant = model_variant_from_string(jm.value("variant", "tci"));
        c.model.j1 = jm.value("j1", 1.0);
        c.model.rescaled = jm.value("rescaled", true);
        c.model.eq4_normalization = jm.value("eq4_normalization", true);
        c.model.allow_ferromagnetic = jm.value("allow_ferromagnetic", false);
    }
    c.j2_over_j1 = grid_from_json(j.at("grid").at("j2_over_j1"));
    c.lambda_bar = grid_from_json(j.at("grid").at("lambda_bar"));
    if (j.contains("sector")) {
        const auto& js = j.at("sector");
        c.sector.two_m = js.value("two_m", 0);
        if (js.contains("momentum") && !js.at("momentum").is_null())
            c.sector.momentum_index = js.at("momentum").get<int>();
        if (js.contains("parity") && !js.at("parity").is_null())
            c.sector.parity = js.at("parity").get<int>();
    }
    if (j.contains("observables")) {
        c.observables.clear();
        for (const auto& name : j.at("observables")) {
            const auto it = kObservableNames.find(name.get<std::string>());
            require(it != kObservableNames.end(), ErrorCode::InvalidArgument,
                    "unknown observable '" + name.get<std::string>() + "'");
            c.observables.insert(it->second);
        }
    }
    if (j.contains("eigen")) {
        const auto& je = j.at("eigen");
        c.eigen.n_eigenpairs = je.value("n", 1);
        c.eigen.tolerance = je.value("tolerance", 1e-10);
        c.eigen.max_iterations = je.value("max_iterations", 200000);
        c.eigen.max_basis_vectors = je.value("max_basis", 400);
    }
    if (j.contains("delta_lambda") && !j.at("delta_lambda").is_null())
        c.delta_lambda = j.at("delta_lambda").get<double>();
    c.mapping_levels = j.value("mapping_levels", 5);
    c.output_dir = j.value("output_dir", "out");
    c.seed = j.value("seed", uint64_t(12345));
    c.eigen.seed = c.seed;
    return c;
}

RunConfig RunConfig::from_json_file(const fs::path& path) {
    std::ifstream in(path);
    require(in.good(), ErrorCode::InvalidArgument, "cannot open config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

std::string RunConfig::to_json_text() const {
    json j;
    j["version"] = version;
    j["lattice"] = {{"kind", to_string(lattice.kind)},
                    {"t1", {lattice.t1[0], lattice.t1[1]}},
                    {"t2", {lattice.t2[0], lattice.t2[1]}}};
    j["model"] = {{"variant", to_string(model.variant)},
                  {"j1", model.j1},
                  {"rescaled", model.rescaled},
                  {"eq4_normalization", model.eq4_normalization},
                  {"allow_ferromagnetic", model.allow_ferromagnetic}};
    j["grid"] = {{"j2_over_j1", grid_to_json(j2_over_j1)},
                 {"lambda_bar", grid_to_json(lambda_bar)}};
    json js;
    js["two_m"] = sector.two_m;
    js["momentum"] = sector.momentum_index ? json(*sector.momentum_index) : json(nullptr);
    js["parity"] = sector.parity ? json(*sector.parity) : json(nullptr);
    j["sector"] = js;
    std::vector<std::string> obs;
    for (const auto& [name, o] : kObservableNames)
        if (observables.count(o)) obs.push_back(name);
    j["observables"] = obs;
    j["eigen"] = {{"n", eigen.n_eigenpairs},
                  {"tolerance", eigen.tolerance},
                  {"max_iterations", eigen.max_iterations},
                  {"max_basis", eigen.max_basis_vectors}};
    j["delta_lambda"] = delta_lambda ? json(*delta_lambda) : json(nullptr);
    j["mapping_levels"] = mapping_levels;
    j["output_dir"] = output_dir;
    j["seed"] = seed;
    return j.dump(2);
}

std::vector<std::string> check_config(const std::string& json_text) {
    std::vector<std::string> errors;
    json j;
    try {
        j = json::parse(json_text);
    } catch (const std::exception& e) {
        errors.push_back(std::string("not valid JSON: ") + e.what());
        return errors;
    }
    for (const char* key : {"lattice", "grid"})
        if (!j.contains(key)) errors.push_back(std::string("missing required section '") + key + "'");
    if (!errors.empty()) return errors;
    try {
        RunConfig c = RunConfig::from_json_text(json_text);
        if (c.j2_over_j1.values.empty()) errors.push_back("empty j2_over_j1 grid");
        if (c.lambda_bar.values.empty()) errors.push_back("empty lambda_bar grid");
        auto cluster = build_cluster(c.lattice);
        if (std::abs(c.sector.two_m) > cluster->n_sites() ||
            (cluster->n_sites() + c.sector.two_m) % 2 != 0)
            errors.push_back("sector two_m incompatible with the cluster size");
        if (c.sector.parity && c.sector.two_m != 0)
            errors.push_back("parity requires two_m = 0");
        if (c.sector.momentum_index &&
            (*c.sector.momentum_index < 0 ||
             *c.sector.momentum_index >= static_cast<int>(cluster->momenta().size())))
            errors.push_back("momentum index out of range");
        // round-trip stability
        RunConfig c2 = RunConfig::from_json_text(c.to_json_text());
        if (c2.to_json_text() != c.to_json_text())
            errors.push_back("config does not round-trip losslessly");
    } catch (const std::exception& e) {
        errors.push_back(e.what());
    }
    return errors;
}

fs::path resolve_output_dir(const std::string& dir) {
    fs::path p(dir);
    if (p.is_absolute()) return p;
    if (const char* root = std::getenv("TCI_OUTPUT_ROOT")) return fs::path(root) / p;
    return p;
}

namespace {

std::string point_name(int i_j2, int i_lambda) {
    std::ostringstream os;
    os << "p_" << i_j2 << "_" << i_lambda << ".json";
    return os.str();
}

json run_point(const RunConfig& cfg, const ClusterPtr& cluster, int i_j2, int i_lambda) {
    const double j2_over_j1 = cfg.j2_over_j1.values[i_j2];
    const double lambda_bar = cfg.lambda_bar.values[i_lambda];
    ModelParams params = cfg.model;
    params.j2 = j2_over_j1 * params.j1;
    params.lambda = lambda_bar;

    EigenRequest req = cfg.eigen;
    // deterministic per-point seed
    req.seed = cfg.seed ^ (uint64_t(i_j2) << 32) ^ uint64_t(i_lambda) ^ 0x9e3779b97f4a7c15ull;

    json rec;
    rec["version"] = cfg.version;
    rec["params"] = {{"j1", params.j1},          {"j2", params.j2},
                     {"j2_over_j1", j2_over_j1}, {"lambda", lambda_bar},
                     {"rescaled", params.rescaled}, {"variant", to_string(params.variant)}};
    rec["lattice"] = {{"kind", to_string(cfg.lattice.kind)},
                      {"t1", {cfg.lattice.t1[0], cfg.lattice.t1[1]}},
                      {"t2", {cfg.lattice.t2[0], cfg.lattice.t2[1]}},
                      {"n_sites", cluster->n_sites()}};
    rec["sector"] = {{"two_m", cfg.sector.two_m}};
    if (cfg.sector.momentum_index) rec["sector"]["momentum"] = *cfg.sector.momentum_index;
    if (cfg.sector.parity) rec["sector"]["parity"] = *cfg.sector.parity;
    rec["provenance"] = {{"seed", req.seed},
                         {"eigen", {{"n", req.n_eigenpairs},
                                    {"tolerance", req.tolerance},
                                    {"max_iterations", req.max_iterations}}},
                         {"code_version", kVersion},
                         {"timestamp", std::chrono::duration_cast<std::chrono::seconds>(
                                           std::chrono::system_clock::now().time_since_epoch())
                                           .count()}};

    auto plain = SectorBasis::enumerate(cluster, cfg.sector.two_m);
    BasisPtr basis = plain;
    if (cfg.sector.momentum_index)
        basis = plain->reduce(*cfg.sector.momentum_index, cfg.sector.parity);

    auto op = SpinHamiltonian::from_params(params, basis);
    const auto res = lowest_eigenpairs(*op, req);
    rec["provenance"]["iterations"] = res.iterations;
    rec["converged"] = res.converged;
    if (cfg.observables.count(Observable::Spectrum)) rec["eigenvalues"] = res.eigenvalues;

    StateVector ground(basis, res.eigenvectors.at(0));
    StateVector ground_plain =
        basis->reduced() ? expand(ground, plain) : ground;

    if (cfg.observables.count(Observable::TotalSpin)) {
        const auto ts = total_spin(ground_plain);
        rec["total_spin"] = {{"s_squared", ts.s_squared}, {"variance", ts.variance}};
        if (ts.s) rec["total_spin"]["s"] = *ts.s;
    }
    if (cfg.observables.count(Observable::StructureFactors)) {
        json sf;
        for (char comp : {'x', 'y', 'z'}) {
            const auto r = structure_factor(ground_plain, comp, *cluster);
            json entry;
            entry["values"] = r.values;
            for (const auto& [label, v] : r.star_sums) entry["star"][label] = v;
            sf[std::string(1, comp) + std::string(1, comp)] = entry;
        }
        rec["structure_factors"] = sf;
    }
    if (cfg.observables.count(Observable::Fidelity)) {
        double dl = cfg.delta_lambda.value_or(0.0);
        if (dl <= 0.0) {
            const auto& g = cfg.lambda_bar.values;
            const double spacing =
                g.size() > 1 ? std::abs(g[1] - g[0]) : std::max(1e-3, 1e-3 * g[0]);
            dl = 1e-3 * spacing;
        }
        const auto curve = fidelity_susceptibility(params, cluster, {lambda_bar}, dl,
                                                   cfg.sector, req);
        rec["fidelity"] = {{"chi_f", curve.chi_f.at(0)},
                           {"delta_lambda", dl},
                           {"degenerate", static_cast<bool>(curve.degenerate.at(0))}};
    }
    if (cfg.observables.count(Observable::MappingCheck)) {
        const auto cmp = heisenberg_mapping_check(params, cluster, cfg.mapping_levels, req);
        rec["mapping_check"] = {{"tci", cmp.tci_levels},
                                {"heisenberg_singlet", cmp.heisenberg_singlet_levels},
                                {"differences", cmp.differences},
                                {"tolerance", cmp.tolerance}};
    }
    return rec;
}

} // namespace

ScanOutcome run_scan(const RunConfig& config, bool force, int workers) {
    require(!config.j2_over_j1.values.empty() && !config.lambda_bar.values.empty(),
            ErrorCode::InvalidArgument, "scan grids must be non-empty");
    const fs::path out_root = resolve_output_dir(config.output_dir);
    const fs::path records = out_root / "records";
    fs::create_directories(records);
    {
        std::ofstream cfg(out_root / "config.json");
        cfg << config.to_json_text() << "\n";
    }

    auto cluster = build_cluster(config.lattice);
    struct Task {
        int i, j;
    };
    std::vector<Task> tasks;
    for (size_t i = 0; i < config.j2_over_j1.values.size(); ++i)
        for (size_t j = 0; j < config.lambda_bar.values.size(); ++j)
            tasks.push_back({static_cast<int>(i), static_cast<int>(j)});

    ScanOutcome outcome;
    outcome.points.resize(tasks.size());
    std::atomic<size_t> next{0};
    std::mutex io_mutex;

    auto worker = [&]() {
        while (true) {
            const size_t k = next.fetch_add(1);
            if (k >= tasks.size()) break;
            const auto [i, j] = tasks[k];
            PointResult& pr = outcome.points[k];
            pr.i_j2 = i;
            pr.i_lambda = j;
            const fs::path path = records / point_name(i, j);
            pr.record_path = path.string();
            if (!force && fs::exists(path)) {
                pr.ok = true;
                std::lock_guard<std::mutex> lock(io_mutex);
                ++outcome.n_skipped;
                continue;
            }
            json rec;
            try {
                rec = run_point(config, cluster, i, j);
                pr.ok = true;
            } catch (const std::exception& e) {
                pr.ok = false;
                pr.error = e.what();
                rec["error"] = e.what();
                rec["params"] = {{"j2_over_j1", config.j2_over_j1.values[i]},
                                 {"lambda", config.lambda_bar.values[j]}};
            }
            const fs::path tmp = path.string() + ".tmp";
            {
                std::ofstream out(tmp);
                out << rec.dump(2) << "\n";
            }
            fs::rename(tmp, path);
            std::lock_guard<std::mutex> lock(io_mutex);
            pr.ok ? ++outcome.n_run : ++outcome.n_failed;
        }
    };

    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return outcome;
}

namespace {

struct RecordGrid {
    std::vector<double> j2;       // ascending unique
    std::vector<double> lambda;   // ascending unique
    std::map<std::pair<int, int>, json> cells;
};

RecordGrid load_records(const fs::path& records_dir) {
    RecordGrid g;
    std::vector<json> recs;
    require(fs::exists(records_dir), ErrorCode::InvalidArgument,
            "records directory does not exist: " + records_dir.string());
    for (const auto& entry : fs::directory_iterator(records_dir)) {
        if (entry.path().extension() != ".json") continue;
        std::ifstream in(entry.path());
        json j;
        in >> j;
        recs.push_back(std::move(j));
    }
    std::set<double> j2s, lams;
    for (const auto& r : recs) {
        j2s.insert(r.at("params").at("j2_over_j1").get<double>());
        lams.insert(r.at("params").at("lambda").get<double>());
    }
    g.j2.assign(j2s.begin(), j2s.end());
    g.lambda.assign(lams.begin(), lams.end());
    auto index_of = [](const std::vector<double>& v, double x) {
        for (size_t i = 0; i < v.size(); ++i)
            if (std::abs(v[i] - x) <= 1e-12 * std::max(1.0, std::abs(x))) return static_cast<int>(i);
        return -1;
    };
    for (auto& r : recs) {
        const int i = index_of(g.j2, r.at("params").at("j2_over_j1").get<double>());
        const int j = index_of(g.lambda, r.at("params").at("lambda").get<double>());
        g.cells[{i, j}] = std::move(r);
    }
    return g;
}

void write_matrix_csv(const fs::path& file, const RecordGrid& g,
                      const std::function<double(const json&)>& extract) {
    std::ofstream out(file);
    out << "lambda_bar";
    for (double v : g.j2) out << "," << v;
    out << "\n";
    out.precision(12);
    for (size_t j = 0; j < g.lambda.size(); ++j) {
        out << g.lambda[j];
        for (size_t i = 0; i < g.j2.size(); ++i) {
            out << ",";
            const auto it = g.cells.find({static_cast<int>(i), static_cast<int>(j)});
            if (it != g.cells.end() && !it->second.contains("error")) out << extract(it->second);
        }
        out << "\n";
    }
}

} // namespace

std::vector<std::string> emit_plotdata(const fs::path& records_dir, Figure figure,
                                       const fs::path& out_dir) {
    const RecordGrid grid = load_records(records_dir);
    // completeness check
    std::vector<std::string> missing;
    for (size_t i = 0; i < grid.j2.size(); ++i)
        for (size_t j = 0; j < grid.lambda.size(); ++j)
            if (!grid.cells.count({static_cast<int>(i), static_cast<int>(j)})) {
                std::ostringstream os;
                os << "(j2/j1=" << grid.j2[i] << ", lambda=" << grid.lambda[j] << ")";
                missing.push_back(os.str());
            }
    if (!missing.empty()) {
        std::string msg = "incomplete grid, missing points:";
        for (const auto& m : missing) msg += " " + m;
        throw Error(ErrorCode::IncompleteGrid, msg);
    }
    fs::create_directories(out_dir);
    std::vector<std::string> files;

    if (figure == Figure::PhasePanels) {
        struct Panel {
            std::string file;
            std::function<double(const json&)> extract;
        };
        std::vector<Panel> panels;
        const json& first = grid.cells.begin()->second;
        if (first.contains("fidelity"))
            panels.push_back({"chi_f.csv", [](const json& r) {
                                  return r.at("fidelity").at("chi_f").get<double>();
                              }});
        // structure-factor panels adapt to the labels present in the records
        if (first.contains("structure_factors")) {
            for (const std::string comp : {"zz", "xx"}) {
                for (const std::string label : {"M", "X", "K", "Gamma"}) {
                    if (!first.at("structure_factors").at(comp).at("star").contains(label))
                        continue;
                    panels.push_back({"s" + comp + "_" + label + ".csv",
                                      [comp, label](const json& r) {
                                          return r.at("structure_factors")
                                              .at(comp)
                                              .at("star")
                                              .at(label)
                                              .get<double>();
                                      }});
                }
            }
        }
        for (const auto& p : panels) {
            const fs::path f = out_dir / p.file;
            write_matrix_csv(f, grid, p.extract);
            files.push_back(f.string());
        }
        // fidelity peaks per J2/J1 column, parabolic refinement
        if (grid.cells.begin()->second.contains("fidelity")) {
            const fs::path f = out_dir / "chi_f_peaks.csv";
            std::ofstream out(f);
            out << "j2_over_j1,lambda_bar,chi_f,refined\n";
            out.precision(12);
            for (size_t i = 0; i < grid.j2.size(); ++i) {
                std::vector<double> chi(grid.lambda.size());
                for (size_t j = 0; j < grid.lambda.size(); ++j)
                    chi[j] = grid.cells.at({static_cast<int>(i), static_cast<int>(j)})
                                 .at("fidelity")
                                 .at("chi_f")
                                 .get<double>();
                for (size_t j = 1; j + 1 < chi.size(); ++j) {
                    if (!(chi[j] > chi[j - 1] && chi[j] >= chi[j + 1])) continue;
                    double x = grid.lambda[j], y = chi[j];
                    bool refined = false;
                    const double denom = chi[j - 1] - 2 * chi[j] + chi[j + 1];
                    if (std::abs(denom) > 1e-300) {
                        const double shift = 0.5 * (chi[j - 1] - chi[j + 1]) / denom;
                        if (std::abs(shift) <= 1.0) {
                            x = grid.lambda[j] + shift * 0.5 * (grid.lambda[j + 1] - grid.lambda[j - 1]);
                            y = chi[j] - 0.25 * (chi[j - 1] - chi[j + 1]) * shift;
                            refined = true;
                        }
                    }
                    out << grid.j2[i] << "," << x << "," << y << "," << (refined ? 1 : 0) << "\n";
                }
            }
            files.push_back(f.string());
        }
    } else {
        const fs::path f = out_dir / "spectrum_pairs.csv";
        std::ofstream out(f);
        out << "j2_over_j1,lambda_bar,level,tci,heisenberg_singlet,difference\n";
        out.precision(12);
        for (const auto& [key, rec] : grid.cells) {
            if (!rec.contains("mapping_check")) continue;
            const auto& mc = rec.at("mapping_check");
            const auto tci = mc.at("tci").get<std::vector<double>>();
            const auto heis = mc.at("heisenberg_singlet").get<std::vector<double>>();
            const auto diff = mc.at("differences").get<std::vector<double>>();
            for (size_t l = 0; l < tci.size(); ++l)
                out << rec.at("params").at("j2_over_j1").get<double>() << ","
                    << rec.at("params").at("lambda").get<double>() << "," << l << "," << tci[l]
                    << "," << heis[l] << "," << diff[l] << "\n";
        }
        files.push_back(f.string());
    }
    return files;
}

} // namespace tci::scan
