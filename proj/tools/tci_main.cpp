#include <fstream>
#include <iomanip>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tci/eigensolve.hpp"
#include "tci/observables.hpp"
#include "tci/scan.hpp"
#include "tci/variational.hpp"
#include "tci/version.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using nlohmann::json;

namespace {

struct LatticeArgs {
    std::string kind = "square";
    std::vector<int> t1{4, 0}, t2{0, 4};

    void attach(CLI::App* app) {
        app->add_option("--lattice", kind, "chain|square|triangular|kagome");
        app->add_option("--t1", t1, "torus vector 1 (two integers)")->expected(2);
        app->add_option("--t2", t2, "torus vector 2 (two integers)")->expected(2);
    }
    tci::LatticeSpec spec() const {
        tci::LatticeSpec s;
        s.kind = tci::lattice_kind_from_string(kind);
        s.t1 = {t1[0], t1[1]};
        s.t2 = {t2[0], t2[1]};
        return s;
    }
};

json cluster_json(const tci::LatticeCluster& cl) {
    json j;
    j["kind"] = tci::to_string(cl.kind());
    j["n_sites"] = cl.n_sites();
    j["n_cells"] = cl.n_cells();
    json sites = json::array();
    for (const auto& p : cl.positions()) sites.push_back({p.x, p.y});
    j["sites"] = sites;
    auto bonds_json = [](const std::vector<tci::Bond>& bonds) {
        json out = json::array();
        for (const auto& b : bonds) out.push_back({b.i, b.j, b.multiplicity});
        return out;
    };
    j["bonds1"] = bonds_json(cl.bonds1());
    j["bonds2"] = bonds_json(cl.bonds2());
    json momenta = json::array();
    for (const auto& m : cl.momenta())
        momenta.push_back({{"frac", {m.p, m.q, m.den}}, {"cart", {m.cart.x, m.cart.y}}});
    j["momenta"] = momenta;
    j["spin_inversion"] = cl.spin_inversion();
    return j;
}

int cmd_describe(const LatticeArgs& lat, const std::string& json_out, bool sectors) {
    auto cl = tci::build_cluster(lat.spec());
    std::cout << cl->describe() << "\n";
    if (sectors) {
        const int n = cl->n_sites();
        std::cout << "sector dimensions (two_m : plain dim):\n";
        for (int two_m = n % 2; two_m <= n; two_m += 2) {
            auto basis = tci::SectorBasis::enumerate(cl, two_m);
            std::cout << "  " << std::setw(3) << two_m << " : " << basis->dim() << "\n";
            if (two_m == 0) {
                std::cout << "      reduced (momentum, parity : dim, zero-norm dropped):\n";
                for (size_t k = 0; k < cl->momenta().size(); ++k) {
                    for (int par : {+1, -1}) {
                        auto red = basis->reduce(static_cast<int>(k), par);
                        std::cout << "        q" << k << ", " << (par > 0 ? "+" : "-") << " : "
                                  << red->dim() << ", " << red->dropped_zero_norm() << "\n";
                    }
                }
            }
        }
    }
    if (!json_out.empty()) {
        std::ofstream out(json_out);
        out << cluster_json(*cl).dump(2) << "\n";
        std::cout << "cluster JSON written to " << json_out << "\n";
    }
    return 0;
}

int cmd_spectrum(const LatticeArgs& lat, const std::string& variant, double j1, double j2,
                 double lambda, bool rescaled, int two_m, int momentum, int parity, int n_eigen,
                 bool total_spin_tags, uint64_t seed) {
    auto cl = tci::build_cluster(lat.spec());
    tci::ModelParams params;
    params.variant = tci::model_variant_from_string(variant);
    params.j1 = j1;
    params.j2 = j2;
    params.lambda = lambda;
    params.rescaled = rescaled;

    auto plain = tci::SectorBasis::enumerate(cl, two_m);
    tci::BasisPtr basis = plain;
    if (momentum >= 0)
        basis = plain->reduce(momentum, parity == 0 ? std::nullopt : std::optional<int>(parity));
    std::cout << "sector dim = " << basis->dim() << "\n";

    auto op = tci::SpinHamiltonian::from_params(params, basis);
    tci::EigenRequest req;
    req.n_eigenpairs = std::min<int64_t>(n_eigen, basis->dim());
    req.seed = seed;
    auto res = tci::lowest_eigenpairs(*op, req);
    if (total_spin_tags) tci::resolve_total_spin(res, basis);
    std::cout << std::setprecision(12);
    for (size_t i = 0; i < res.eigenvalues.size(); ++i) {
        std::cout << std::setw(3) << i << "  " << std::setw(18) << res.eigenvalues[i] << "  res "
                  << std::scientific << std::setprecision(2) << res.residual_norms[i]
                  << std::defaultfloat << std::setprecision(12);
        if (total_spin_tags) {
            tci::StateVector v(basis, res.eigenvectors[i]);
            tci::StateVector vp = basis->reduced() ? tci::expand(v, plain) : v;
            const auto ts = tci::total_spin(vp);
            std::cout << "  <S^2> " << ts.s_squared;
            if (ts.s) std::cout << "  S " << *ts.s;
        }
        std::cout << "\n";
    }
    if (!res.converged) {
        std::cerr << "warning: not all pairs converged (" << res.iterations << " matvecs)\n";
        return 2;
    }
    return 0;
}

int cmd_variational(int n_sites, const std::string& phase_name, double j1, double j2,
                    double lambda_bar, const std::string& curve_out,
                    const std::string& crossover_csv, int crossover_sites) {
    const auto phase = tci::ansatz_phase_from_string(phase_name);
    tci::AnsatzSpec spec;
    spec.n_sites = n_sites;
    spec.j_effective = tci::effective_coupling(phase, j1, j2);
    spec.lambda = lambda_bar;
    spec.rescaled = true;
    spec.phase = phase;

    const auto res = tci::minimize_theta(spec);
    const auto gap = tci::symmetrized_gap(spec);
    std::cout << std::setprecision(12);
    std::cout << "J_eff = " << spec.j_effective << "\n";
    std::cout << "theta* = " << res.theta_star << (res.boundary_hit ? " (boundary)" : "") << "\n";
    std::cout << "E(theta*) = " << res.energy << "\n";
    std::cout << "S_xx(0) = " << res.factors.sxx0 << "  S_xx(Q) = " << res.factors.sxxq
              << "  S_zz(Q) = " << res.factors.szzq << "\n";
    std::cout << "gap (per-parity) = " << gap.gap << "  gap (shared theta*) = "
              << gap.gap_shared_theta << "\n";
    try {
        const auto asym = tci::asymptotic_quantities(spec);
        std::cout << "asymptotic: beta = " << asym.beta << " eta = " << asym.eta
                  << " theta* = " << asym.theta_star << " E = " << asym.energy
                  << " gap = " << tci::asymptotic_gap(spec) << "\n";
    } catch (const tci::Error&) {
        std::cout << "asymptotics out of validity (27 lambda-bar/2J >= 1)\n";
    }

    if (!curve_out.empty()) {
        std::ofstream out(curve_out);
        out << "theta,energy,energy_bosonic,e_plus,e_minus\n";
        out << std::setprecision(12);
        const double theta_max = std::log(static_cast<double>(n_sites)) + 5.0;
        for (int i = 0; i <= 400; ++i) {
            const double th = theta_max * i / 400;
            const auto se = tci::symmetrized_energies(spec, th);
            out << th << "," << tci::variational_energy(spec, th) << ","
                << tci::bosonic_energy(spec, th) << "," << se.e_plus << ",";
            if (!se.minus_unstable) out << se.e_minus;
            out << "\n";
        }
        std::cout << "E(theta) curve written to " << curve_out << "\n";
    }
    if (!crossover_csv.empty()) {
        // input CSV: j2_over_j1,A,provenance
        std::ifstream in(crossover_csv);
        if (!in.good()) {
            std::cerr << "cannot open " << crossover_csv << "\n";
            return 1;
        }
        std::vector<double> grid, as;
        std::vector<std::string> prov;
        std::string line;
        std::getline(in, line);   // header
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::stringstream ss(line);
            std::string a, b, c;
            std::getline(ss, a, ',');
            std::getline(ss, b, ',');
            std::getline(ss, c);
            grid.push_back(std::stod(a));
            as.push_back(std::stod(b));
            prov.push_back(c);
        }
        const auto pts = tci::crossover_boundary(grid, as, prov, crossover_sites, j1, phase);
        std::cout << "j2_over_j1,critical_lambda_bar,crossing_found,provenance\n";
        for (const auto& pt : pts)
            std::cout << pt.j2_over_j1 << "," << pt.critical_lambda_bar << ","
                      << pt.crossing_found << "," << pt.provenance << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact-diagonalization and variational toolkit for the "
                 "Tavis-Cummings-Ising spin model"};
    app.set_version_flag("--version", tci::kVersion);
    app.require_subcommand(1);

    // describe
    auto* describe = app.add_subcommand("describe", "cluster geometry, bonds, momenta, sectors");
    LatticeArgs dlat;
    dlat.attach(describe);
    std::string describe_json;
    bool describe_sectors = false;
    describe->add_option("--json", describe_json, "write cluster JSON to this file");
    describe->add_flag("--sectors", describe_sectors, "print sector dimensions");

    // spectrum
    auto* spectrum = app.add_subcommand("spectrum", "low-lying eigenvalues of one parameter point");
    LatticeArgs slat;
    slat.attach(spectrum);
    std::string variant = "tci";
    double j1 = 1.0, j2 = 0.0, lambda = 0.0;
    bool rescaled = false;
    int two_m = 0, momentum = -1, parity = 0, n_eigen = 5;
    bool spin_tags = false;
    uint64_t seed = 12345;
    spectrum->add_option("--variant", variant, "tci|heisenberg|ising|cavity");
    spectrum->add_option("--j1", j1);
    spectrum->add_option("--j2", j2);
    spectrum->add_option("--lambda", lambda, "cavity coupling (lambda-bar when --rescaled)");
    spectrum->add_flag("--rescaled", rescaled, "lambda = N * lambda-bar");
    spectrum->add_option("--two-m", two_m, "magnetization sector (2M)");
    spectrum->add_option("--momentum", momentum, "momentum index; -1 for the plain sector");
    spectrum->add_option("--parity", parity, "spin-inversion parity +-1 (0 = none)");
    spectrum->add_option("-n,--n-eigen", n_eigen);
    spectrum->add_flag("--total-spin", spin_tags, "tag levels with <S^2>");
    spectrum->add_option("--seed", seed);

    // variational
    auto* variational = app.add_subcommand("variational", "squeezed-AFM ansatz quantities");
    int vn = 100;
    std::string phase = "square-neel", curve_out, crossover_csv;
    double vj1 = 1.0, vj2 = 0.0, lambda_bar = 0.01;
    int crossover_sites = 10000;
    variational->add_option("--n-sites", vn);
    variational->add_option("--phase", phase, "square-neel|square-stripe|triangular-stripe");
    variational->add_option("--j1", vj1);
    variational->add_option("--j2", vj2);
    variational->add_option("--lambda-bar", lambda_bar);
    variational->add_option("--curve", curve_out, "write E(theta) curve CSV");
    variational->add_option("--crossover", crossover_csv,
                            "CSV of (j2_over_j1, A, provenance) Heisenberg energies");
    variational->add_option("--crossover-sites", crossover_sites);

    // scan
    auto* scan = app.add_subcommand("scan", "batch parameter sweep from a config file");
    std::string config_path;
    bool force = false;
    int workers = 1, threads_per_point = 0;
    scan->add_option("--config", config_path)->required();
    scan->add_flag("--force", force, "recompute existing records");
    scan->add_option("--workers", workers, "concurrent grid points");
    scan->add_option("--threads-per-point", threads_per_point, "OpenMP threads per point");

    // emit
    auto* emit = app.add_subcommand("emit", "plot-ready CSV matrices from scan records");
    std::string records_dir, out_dir = "plotdata", figure = "phase-panels";
    emit->add_option("--records", records_dir)->required();
    emit->add_option("--out", out_dir);
    emit->add_option("--figure", figure, "phase-panels|spectrum-pairs");

    // check-config
    auto* check = app.add_subcommand("check-config", "validate a scan config file");
    std::string check_path;
    check->add_option("--config", check_path)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (describe->parsed()) return cmd_describe(dlat, describe_json, describe_sectors);
        if (spectrum->parsed())
            return cmd_spectrum(slat, variant, j1, j2, lambda, rescaled, two_m, momentum, parity,
                                n_eigen, spin_tags, seed);
        if (variational->parsed())
            return cmd_variational(vn, phase, vj1, vj2, lambda_bar, curve_out, crossover_csv,
                                   crossover_sites);
        if (scan->parsed()) {
#ifdef _OPENMP
            if (threads_per_point > 0) omp_set_num_threads(threads_per_point);
#endif
            const auto cfg = tci::scan::RunConfig::from_json_file(config_path);
            const auto outcome = tci::scan::run_scan(cfg, force, workers);
            std::cout << "scan: " << outcome.n_run << " run, " << outcome.n_skipped
                      << " skipped, " << outcome.n_failed << " failed\n";
            for (const auto& p : outcome.points)
                if (!p.ok) std::cerr << "  point (" << p.i_j2 << "," << p.i_lambda << "): "
                                     << p.error << "\n";
            return outcome.n_failed == 0 ? 0 : 1;
        }
        if (emit->parsed()) {
            const auto fig = figure == "spectrum-pairs" ? tci::scan::Figure::SpectrumPairs
                                                        : tci::scan::Figure::PhasePanels;
            const auto files = tci::scan::emit_plotdata(records_dir, fig, out_dir);
            for (const auto& f : files) std::cout << f << "\n";
            return 0;
        }
        if (check->parsed()) {
            std::ifstream in(check_path);
            if (!in.good()) {
                std::cerr << "cannot open " << check_path << "\n";
                return 1;
            }
            std::stringstream ss;
            ss << in.rdbuf();
            const auto errors = tci::scan::check_config(ss.str());
            if (errors.empty()) {
                std::cout << "config OK\n";
                return 0;
            }
            for (const auto& e : errors) std::cerr << "config error: " << e << "\n";
            return 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
