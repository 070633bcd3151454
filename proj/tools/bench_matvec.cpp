// Benchmark: serial reference kernel vs the OpenMP production kernel for the
// TCI matvec, over a range of sector sizes and thread counts.
#include <chrono>
#include <iomanip>
#include <iostream>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "tci/reference.hpp"

using namespace tci;

namespace {

double time_apply(const std::function<void()>& fn, int reps) {
    // warm-up
    fn();
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
}

} // namespace

int main(int argc, char** argv) {
    int n_max = 20;
    if (argc > 1) n_max = std::atoi(argv[1]);

    std::cout << "TCI matvec: serial reference vs OpenMP kernel (times in ms, best of 3)\n";
    std::cout << std::setw(4) << "N" << std::setw(12) << "dim" << std::setw(12) << "ref"
              << std::setw(12) << "omp(1)" << std::setw(12) << "omp(max)" << std::setw(10)
              << "speedup" << "\n";

    for (int n = 12; n <= n_max; n += 4) {
        LatticeSpec spec;
        spec.kind = LatticeKind::Square;
        spec.t1 = {n / 4, 0};
        spec.t2 = {0, 4};
        auto cluster = build_cluster(spec);
        auto basis = SectorBasis::enumerate(cluster, 0);

        ModelParams params;
        params.variant = ModelVariant::TCI;
        params.j1 = 1.0;
        params.j2 = 0.5;
        params.lambda = 1.0;
        auto h = SpinHamiltonian::from_params(params, basis);

        std::mt19937_64 rng(7);
        std::normal_distribution<double> g;
        Eigen::VectorXcd v(basis->dim()), out(basis->dim());
        for (int64_t i = 0; i < basis->dim(); ++i) v[i] = std::complex<double>(g(rng), g(rng));
        v.normalize();

        const int reps = basis->dim() > 100000 ? 3 : 5;
        const double t_ref = time_apply([&] { ref::apply_hamiltonian(*h, v, out); }, reps);
#ifdef _OPENMP
        const int max_threads = omp_get_max_threads();
        omp_set_num_threads(1);
#endif
        const double t_omp1 = time_apply([&] { h->apply(v, out); }, reps);
#ifdef _OPENMP
        omp_set_num_threads(max_threads);
#endif
        const double t_ompN = time_apply([&] { h->apply(v, out); }, reps);

        // cross-check the two kernels agree
        Eigen::VectorXcd a(basis->dim()), b(basis->dim());
        h->apply(v, a);
        ref::apply_hamiltonian(*h, v, b);
        const double dev = (a - b).norm();

        std::cout << std::setw(4) << n << std::setw(12) << basis->dim() << std::setw(12)
                  << std::fixed << std::setprecision(2) << 1e3 * t_ref << std::setw(12)
                  << 1e3 * t_omp1 << std::setw(12) << 1e3 * t_ompN << std::setw(10)
                  << std::setprecision(2) << t_omp1 / t_ompN << "   |ref-omp| = " << std::scientific
                  << std::setprecision(1) << dev << std::defaultfloat << "\n";
    }
    return 0;
}
