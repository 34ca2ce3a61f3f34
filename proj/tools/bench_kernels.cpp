// Benchmark: OpenMP quadrature kernel vs the serial reference path.
#include "fraclaws/fractional.hpp"
#include "fraclaws/torus.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

double time_of(const std::function<fraclaws::Field()>& fn, int reps, double& checksum) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        const fraclaws::Field out = fn();
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
        checksum = fraclaws::lp_norm(out, 2.0);
    }
    return best;
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (OpenMP off)\n");
#endif
    for (std::size_t m : {128UL, 256UL, 512UL}) {
        fraclaws::TorusGrid grid(m);
        fraclaws::Field f(grid);
        for (std::size_t i = 0; i < m; ++i) {
            const double x = grid.x(i);
            f.values[i] = std::sin(x) + 0.3 * std::cos(3.0 * x) + 0.1 * std::sin(7.0 * x);
        }
        const double h = grid.spacing();
        double cs_par = 0.0, cs_ser = 0.0;
        const double t_par =
            time_of([&] { return fraclaws::apply_quadrature(f, 0.5, h, 50.0); }, 5, cs_par);
        const double t_ser =
            time_of([&] { return fraclaws::apply_quadrature_serial(f, 0.5, h, 50.0); }, 5, cs_ser);
        std::printf("M=%4zu  parallel %8.3f ms  serial %8.3f ms  speedup %5.2fx  |drift| %.3e\n",
                    m, 1e3 * t_par, 1e3 * t_ser, t_ser / t_par, std::abs(cs_par - cs_ser));
    }
    return 0;
}
