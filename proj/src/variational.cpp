#include "tci/variational.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "tci/bits.hpp"
#include "tci/errors.hpp"

namespace tci {

namespace {

// log(tanh(theta)), stable for large theta where tanh rounds to 1.
double log_tanh(double theta) {
    return std::log1p(-2.0 / (std::exp(2.0 * theta) + 1.0));
}

double golden_minimize(const std::function<double(double)>& f, double lo, double hi,
                       double tol = 1e-12) {
    constexpr double gr = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

// Coarse-scan bracket followed by golden section; returns (theta*, f(theta*),
// boundary flag set when the scan minimum sits at the upper end).
struct ScanMin {
    double theta, value;
    bool boundary;
    bool has_interior;   // strict interior local minimum seen
};

ScanMin scan_minimize(const std::function<double(double)>& f, double theta_max, int grid = 2048) {
    std::vector<double> es(grid);
    double best = std::numeric_limits<double>::infinity();
    int ib = 0;
    for (int i = 0; i < grid; ++i) {
        const double th = theta_max * (i + 1) / grid;
        es[i] = f(th);
        if (es[i] < best) {
            best = es[i];
            ib = i;
        }
    }
    ScanMin out{};
    out.has_interior = false;
    for (int i = 1; i + 1 < grid; ++i)
        if (es[i] < es[i - 1] && es[i] <= es[i + 1]) {
            out.has_interior = true;
            break;
        }
    if (ib >= grid - 1) {
        out.theta = theta_max;
        out.value = es[grid - 1];
        out.boundary = true;
        return out;
    }
    const double lo = theta_max * ib / grid;        // previous node (0 when ib = 0)
    const double hi = theta_max * (ib + 2) / grid;
    out.theta = golden_minimize(f, lo, hi);
    out.value = f(out.theta);
    out.boundary = false;
    // f(0) may undercut the first grid node
    const double f0 = f(0.0);
    if (f0 < out.value) {
        out.theta = 0.0;
        out.value = f0;
    }
    return out;
}

} // namespace

const char* to_string(AnsatzPhase phase) {
    switch (phase) {
        case AnsatzPhase::SquareNeel: return "square-neel";
        case AnsatzPhase::SquareStripe: return "square-stripe";
        case AnsatzPhase::TriangularStripe: return "triangular-stripe";
    }
    return "?";
}

AnsatzPhase ansatz_phase_from_string(const std::string& name) {
    if (name == "square-neel") return AnsatzPhase::SquareNeel;
    if (name == "square-stripe") return AnsatzPhase::SquareStripe;
    if (name == "triangular-stripe") return AnsatzPhase::TriangularStripe;
    throw Error(ErrorCode::InvalidArgument, "unknown ansatz phase '" + name + "'");
}

double effective_coupling(AnsatzPhase phase, double j1, double j2) {
    switch (phase) {
        case AnsatzPhase::SquareNeel: return j1 - j2;
        case AnsatzPhase::SquareStripe: return j2;
        case AnsatzPhase::TriangularStripe: return 0.5 * (j1 + j2);
    }
    return 0.0;
}

void AnsatzSpec::validate() const {
    require(n_sites >= 4 && n_sites % 4 == 0, ErrorCode::InvalidArgument,
            "ansatz requires N >= 4, multiple of 4");
    require(j_effective > 0.0, ErrorCode::InvalidArgument,
            "ansatz applies only where the classical AFM is the Ising ground state (J > 0)");
    require(lambda >= 0.0, ErrorCode::InvalidArgument, "cavity coupling must be >= 0");
}

DickeFactors exact_structure_factors(int n_sites, double theta) {
    require(n_sites >= 4 && n_sites % 4 == 0, ErrorCode::InvalidArgument,
            "exact sums require N >= 4, multiple of 4");
    require(theta >= 0.0 && std::isfinite(theta), ErrorCode::InvalidArgument,
            "theta must be finite and >= 0");
    const double s = n_sites / 4.0;
    const int two_s = n_sites / 2;
    DickeFactors out;
    if (theta == 0.0) {
        out.sxx0 = out.sxxq = s * (s + 1.0) / n_sites - s * s / n_sites;   // = 1/4
        out.szzq = 4.0 * s * s / n_sites;                                  // = N/4
        out.norm2 = 1.0;
        return out;
    }
    const double lt = log_tanh(theta);
    const double t = std::tanh(theta);
    // A^2 = 1 / (cosh^2 (1 - t^{4s+2})), with the bracket via expm1.
    const double one_minus_t4s2 = -std::expm1((2.0 * two_s + 2.0) * lt);
    const double ch = std::cosh(theta);
    out.norm2 = 1.0 / (ch * ch * one_minus_t4s2);

    double sxx0 = 0.0, sxxq = 0.0, szzq = 0.0;
    for (int n = 0; n <= two_s; ++n) {
        const double w = std::exp(2.0 * n * lt);   // t^{2n}, log-domain
        const double sn = s - n;
        const double a = s * (s + 1.0) - sn * sn;
        const double b = s * (s + 1.0) - sn * (sn - 1.0);
        sxx0 += w * (a - t * b);
        sxxq += w * (a + t * b);
        szzq += w * sn * sn;
    }
    out.sxx0 = out.norm2 * sxx0 / n_sites;
    out.sxxq = out.norm2 * sxxq / n_sites;
    out.szzq = 4.0 * out.norm2 * szzq / n_sites;
    return out;
}

double variational_energy(const AnsatzSpec& spec, double theta) {
    spec.validate();
    const auto f = exact_structure_factors(spec.n_sites, theta);
    return spec.cavity_coupling() * spec.n_sites * 2.0 * f.sxx0 -
           2.0 * spec.j_effective * f.szzq;
}

VariationalResult minimize_theta(const AnsatzSpec& spec) {
    spec.validate();
    const double theta_max = std::log(static_cast<double>(spec.n_sites)) + 5.0;
    auto f = [&](double th) { return variational_energy(spec, th); };
    const auto sm = scan_minimize(f, theta_max);
    VariationalResult out;
    out.theta_star = sm.theta;
    out.energy = sm.value;
    out.factors = exact_structure_factors(spec.n_sites, sm.theta);
    out.method = VariationalMethod::ExactSum;
    out.boundary_hit = sm.boundary;
    return out;
}

BosonicFactors bosonic_structure_factors(int n_sites, double theta) {
    const double sh2 = std::sinh(theta) * std::sinh(theta);
    BosonicFactors out;
    const double depletion = 1.0 - 4.0 * sh2 / n_sites;
    out.sxx0 = 0.25 * std::exp(-2.0 * theta) * depletion;
    out.sxxq = 0.25 * std::exp(2.0 * theta) * depletion;
    out.szzq = 0.25 * n_sites - 2.0 * sh2 * (1.0 - 2.0 * std::cosh(2.0 * theta) / n_sites);
    out.valid = sh2 <= 0.5 * n_sites;   // <a+a> = sinh^2 <= 2s
    return out;
}

double bosonic_energy(const AnsatzSpec& spec, double theta) {
    spec.validate();
    const auto f = bosonic_structure_factors(spec.n_sites, theta);
    return spec.cavity_coupling() * spec.n_sites * 2.0 * f.sxx0 -
           2.0 * spec.j_effective * f.szzq;
}

BosonicScan bosonic_minimum(const AnsatzSpec& spec) {
    spec.validate();
    const double theta_max = std::log(static_cast<double>(spec.n_sites)) + 5.0;
    auto f = [&](double th) { return bosonic_energy(spec, th); };
    // The bosonic curve eventually dives to -inf (the mapping's artifact
    // region), so only a strict interior local minimum counts.
    const int grid = 4096;
    BosonicScan out;
    double prev = bosonic_energy(spec, 0.0);
    double cur = f(theta_max / grid);
    for (int i = 1; i < grid; ++i) {
        const double next = f(theta_max * (i + 1) / grid);
        if (cur < prev && cur <= next) {
            const double lo = theta_max * (i - 1) / grid;
            const double hi = theta_max * (i + 1) / grid;
            out.has_interior_minimum = true;
            out.theta_min = golden_minimize(f, lo, hi);
            out.energy_min = f(out.theta_min);
            out.validity_exceeded = !bosonic_structure_factors(spec.n_sites, out.theta_min).valid;
            return out;
        }
        prev = cur;
        cur = next;
    }
    return out;
}

AsymptoticQuantities asymptotic_quantities(const AnsatzSpec& spec) {
    spec.validate();
    require(spec.rescaled, ErrorCode::InvalidArgument, "asymptotics apply in rescaled mode");
    const double r = spec.lambda / spec.j_effective;
    require(27.0 * r / 2.0 < 1.0, ErrorCode::OutOfValidity,
            "27 lambda-bar / 2J >= 1: no real minimum of the depressed cubic");
    AsymptoticQuantities out;
    const double u = std::sqrt(27.0 * r / 2.0);
    out.beta = (2.0 / std::sqrt(3.0)) *
               std::cos((std::numbers::pi / 2.0 + std::atan(u / std::sqrt(1.0 - u * u))) / 3.0);
    out.eta = r / (out.beta * out.beta);
    const double n = spec.n_sites;
    const double j = spec.j_effective;
    const double lb = spec.lambda;
    // Exact minimizer of the simplified large-N energy: e^{4 theta*} = eta N^2 / 2.
    out.theta_star = 0.25 * std::log(out.eta * n * n / 2.0);
    out.energy = -0.5 * j * n + 0.5 * n * (out.beta + 1.0 / out.beta) * std::sqrt(2.0 * j * lb) -
                 0.5 * lb * n * (1.0 + 1.0 / (out.beta * out.beta));
    const double se = std::sqrt(out.eta);
    out.szz_q = 0.25 * n * (1.0 - 2.0 * (se - out.eta));
    out.sxx_q = 0.25 * n * (se - out.eta);
    return out;
}

namespace {

// Shared pieces of the symmetrized energies: X (diagonal), Y (off-diagonal)
// and the overlap w, with (tanh theta)^{2s} in sign-tracked log form.
struct SymParts {
    double x, y, w;
};

SymParts symmetrized_parts(const AnsatzSpec& spec, double theta) {
    const int n = spec.n_sites;
    const double s = n / 4.0;
    const auto f = exact_structure_factors(n, theta);
    const double lam = spec.cavity_coupling();
    const double j = spec.j_effective;
    SymParts out;
    out.x = lam * n * 2.0 * f.sxx0 - 2.0 * j * f.szzq;
    if (theta == 0.0) {
        // (tanh 0)^{2s} = 0 for s >= 1: the parity images are orthogonal
        out.y = 0.0;
        out.w = 0.0;
        return out;
    }
    const double lt = log_tanh(theta);
    const int two_s = n / 2;
    const double sign = (two_s % 2 == 0) ? 1.0 : -1.0;   // (-t)^{2s}
    const double t2s = sign * std::exp(two_s * lt);
    const double fs = (2.0 / 3.0) * s * s * s + s * s + s / 3.0;
    const double t = std::tanh(theta);
    const double coth = 1.0 / t;
    // S^{12}_xx(0) = S^{12}_yy(0): the (2 - tanh - coth) branch; the
    // (2 + tanh + coth) branch is the Q-point element.
    const double sxx12_0 = f.norm2 / n * fs * t2s * (2.0 - t - coth);
    const double szz12_q = 4.0 * f.norm2 / n * fs * t2s;
    out.y = lam * n * 2.0 * sxx12_0 - 2.0 * j * szz12_q;
    out.w = f.norm2 * (2.0 * s + 1.0) * t2s;
    return out;
}

} // namespace

SymmetrizedEnergies symmetrized_energies(const AnsatzSpec& spec, double theta) {
    spec.validate();
    const auto p = symmetrized_parts(spec, theta);
    SymmetrizedEnergies out;
    out.overlap = p.w;
    out.e_plus = (p.x + p.y) / (1.0 + p.w);
    const double denom = 1.0 - p.w;
    out.minus_unstable = denom < 1e-8;
    out.e_minus = out.minus_unstable ? std::numeric_limits<double>::quiet_NaN()
                                     : (p.x - p.y) / denom;
    return out;
}

GapResult symmetrized_gap(const AnsatzSpec& spec) {
    spec.validate();
    const double theta_max = std::log(static_cast<double>(spec.n_sites)) + 5.0;
    auto eplus = [&](double th) { return symmetrized_energies(spec, th).e_plus; };
    auto eminus = [&](double th) {
        const auto se = symmetrized_energies(spec, th);
        return se.minus_unstable ? std::numeric_limits<double>::infinity() : se.e_minus;
    };
    GapResult out;
    const auto mp = scan_minimize(eplus, theta_max);
    const auto mm = scan_minimize(eminus, theta_max);
    out.theta_plus = mp.theta;
    out.theta_minus = mm.theta;
    out.e_plus = mp.value;
    out.e_minus = mm.value;
    out.gap = std::abs(mp.value - mm.value);
    const auto unsym = minimize_theta(spec);
    const auto shared = symmetrized_energies(spec, unsym.theta_star);
    out.gap_shared_theta = shared.minus_unstable
                               ? std::numeric_limits<double>::quiet_NaN()
                               : std::abs(shared.e_plus - shared.e_minus);
    return out;
}

double asymptotic_gap(const AnsatzSpec& spec) {
    const auto a = asymptotic_quantities(spec);   // validates + OutOfValidity
    const double se = std::sqrt(a.eta);
    const double b2 = a.beta * a.beta;
    return 4.0 * spec.j_effective * spec.n_sites * std::exp(-std::sqrt(2.0) / se) *
           ((1.0 - std::sqrt(a.eta / 2.0)) * (1.0 + b2) -
            (std::sqrt(2.0) / (3.0 * se)) * (1.0 - b2));
}

std::vector<CrossoverPoint> crossover_boundary(const std::vector<double>& j2_over_j1_grid,
                                               const std::vector<double>& heisenberg_a,
                                               const std::vector<std::string>& provenance,
                                               int n_sites, double j1,
                                               std::optional<AnsatzPhase> forced_phase) {
    require(!j2_over_j1_grid.empty() && j2_over_j1_grid.size() == heisenberg_a.size(),
            ErrorCode::InvalidArgument, "grid and Heisenberg energies must align");
    std::vector<CrossoverPoint> out;
    for (size_t k = 0; k < j2_over_j1_grid.size(); ++k) {
        CrossoverPoint pt;
        pt.j2_over_j1 = j2_over_j1_grid[k];
        pt.heisenberg_a = heisenberg_a[k];
        pt.provenance = k < provenance.size() ? provenance[k] : "";
        const double j2 = pt.j2_over_j1 * j1;
        pt.phase = forced_phase.value_or(pt.j2_over_j1 < 0.5 ? AnsatzPhase::SquareNeel
                                                             : AnsatzPhase::SquareStripe);
        const double j_eff = effective_coupling(pt.phase, j1, j2);
        if (j_eff <= 0.0) {
            pt.crossing_found = false;
            out.push_back(pt);
            continue;
        }
        const double e_heis = -0.5 * pt.heisenberg_a * j_eff * n_sites;
        AnsatzSpec spec;
        spec.n_sites = n_sites;
        spec.j_effective = j_eff;
        spec.rescaled = true;
        spec.phase = pt.phase;
        auto excess = [&](double lb) {
            spec.lambda = lb;
            return minimize_theta(spec).energy - e_heis;
        };
        // squeezed AFM wins at lambda-bar -> 0 iff A < 1
        double lo = 1e-9 * j_eff;
        if (excess(lo) >= 0.0) {
            pt.crossing_found = false;
            pt.critical_lambda_bar = 0.0;
            out.push_back(pt);
            continue;
        }
        double hi = lo;
        bool bracketed = false;
        for (int it = 0; it < 60; ++it) {
            hi *= 2.0;
            if (excess(hi) > 0.0) {
                bracketed = true;
                break;
            }
        }
        if (!bracketed) {
            pt.crossing_found = false;   // squeezed AFM always wins on this range
            out.push_back(pt);
            continue;
        }
        for (int it = 0; it < 100; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (excess(mid) > 0.0)
                hi = mid;
            else
                lo = mid;
        }
        pt.crossing_found = true;
        pt.critical_lambda_bar = 0.5 * (lo + hi);
        out.push_back(pt);
    }
    return out;
}

StateVector brute_force_ansatz_state(int n_sites, double theta, std::optional<int> parity) {
    require(n_sites >= 4 && n_sites % 4 == 0 && n_sites <= 16,
            ErrorCode::DimensionTooLargeForOracle, "brute-force ansatz supports N <= 16");
    LatticeSpec lspec;
    lspec.kind = LatticeKind::Chain;
    lspec.t1 = {n_sites, 0};
    lspec.t2 = {0, 1};
    lspec.include_j2 = false;   // basis host only, no couplings used
    auto basis = SectorBasis::enumerate(build_cluster(lspec), 0);

    const int half = n_sites / 2;
    const int two_s = half;
    const double lt = theta > 0.0 ? log_tanh(theta) : 0.0;

    // |theta> = A sum_n (-t)^n |s-n>_A |n-s>_B; Dicke amplitudes 1/sqrt(C)
    // per sublattice. A = even sites, B = odd sites.
    StateVector v(basis);
    for (int64_t idx = 0; idx < basis->dim(); ++idx) {
        const uint64_t cfg = basis->state(idx);
        int up_a = 0, up_b = 0;
        for (int i = 0; i < n_sites; ++i) {
            if ((cfg >> i) & 1) (i % 2 == 0 ? up_a : up_b) += 1;
        }
        const int nn = up_b;                  // n = number of up spins on B
        if (up_a != two_s - nn) continue;     // outside the ansatz support
        double amp;
        if (theta == 0.0) {
            if (nn != 0) continue;
            amp = 1.0;
        } else {
            const double mag = std::exp(nn * lt);
            amp = (nn % 2 == 0 ? mag : -mag) /
                  static_cast<double>(bits::binomial(two_s, nn));
        }
        v.amps[idx] += amp;
        if (parity) {
            // Pi|theta> flips every spin: site-wise complement index.
            const uint64_t flipped = ~cfg & ((uint64_t(1) << n_sites) - 1);
            v.amps[basis->index_of(flipped)] += static_cast<double>(*parity) * amp;
        }
    }
    v.normalize();
    return v;
}


BruteForceFactors brute_force_factors(const StateVector& bra, const StateVector& ket) {
    require(bra.basis == ket.basis, ErrorCode::BasisMismatch, "bra/ket basis mismatch");
    const auto& basis = *bra.basis;
    const int n = basis.n_sites();
    require(n <= 16, ErrorCode::DimensionTooLargeForOracle, "brute force supports N <= 16");

    // Work in the full 2^N space so the transverse collective operators can
    // leave the magnetization sector.
    const int64_t full = int64_t(1) << n;
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(full), k = Eigen::VectorXcd::Zero(full);
    for (int64_t i = 0; i < basis.dim(); ++i) {
        b[static_cast<int64_t>(basis.state(i))] = bra.amps[i];
        k[static_cast<int64_t>(basis.state(i))] = ket.amps[i];
    }

    auto collective = [&](const Eigen::VectorXcd& v, char op, int sign_b) {
        // sum_i op_i with A = even sites (+1), B = odd sites (sign_b)
        Eigen::VectorXcd out = Eigen::VectorXcd::Zero(full);
        for (int64_t c = 0; c < full; ++c) {
            if (v[c] == std::complex<double>(0.0, 0.0)) continue;
            for (int i = 0; i < n; ++i) {
                const double sub = (i % 2 == 0) ? 1.0 : static_cast<double>(sign_b);
                const bool up = (c >> i) & 1;
                const int64_t c2 = c ^ (int64_t(1) << i);
                switch (op) {
                    case 'z':
                        out[c] += sub * (up ? 0.5 : -0.5) * v[c];
                        break;
                    case 'x':
                        out[c2] += sub * 0.5 * v[c];
                        break;
                    case 'y':
                        out[c2] += sub * (up ? std::complex<double>(0.0, 0.5)
                                             : std::complex<double>(0.0, -0.5)) * v[c];
                        break;
                }
            }
        }
        return out;
    };

    BruteForceFactors out{};
    const auto val = [&](char op, int sign_b) {
        const auto ob = collective(b, op, sign_b);
        const auto ok = collective(k, op, sign_b);
        return std::real(ob.dot(ok)) / n;
    };
    out.sxx0 = val('x', +1);
    out.sxxq = val('x', -1);
    out.syy0 = val('y', +1);
    out.syyq = val('y', -1);
    out.szz0 = val('z', +1);
    out.szzq = val('z', -1);
    return out;
}

double brute_force_symmetrized_energy(const StateVector& state, double lambda_eff, double j_eff) {
    const auto& basis = *state.basis;
    const int n = basis.n_sites();
    require(n <= 16, ErrorCode::DimensionTooLargeForOracle, "brute force supports N <= 16");
    const auto f = brute_force_factors(state, state);
    // H-tilde = lambda[(Sx^A+Sx^B)^2 + (Sy^A+Sy^B)^2] + (8J/N) Sz^A Sz^B;
    // the Sz product via ((Sz^+)^2 - (Sz^-)^2)/4.
    const double szazb = 0.25 * (f.szz0 - f.szzq) * n;
    return lambda_eff * n * (f.sxx0 + f.syy0) + (8.0 * j_eff / n) * szazb;
}

} // namespace tci
