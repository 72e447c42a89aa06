// Serial vs OpenMP timings for the two parallel kernels: sweep rows and
// Monte Carlo tail counting. Prints CSV: kernel,threads,seconds,speedup,identical
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include <omp.h>

#include "tailbound/montecarlo.hpp"
#include "tailbound/sweep.hpp"

using namespace tailbound;

namespace {

template <class F>
double seconds(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  const int max_threads = argc > 1 ? std::atoi(argv[1]) : omp_get_max_threads();
  const std::size_t samples = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 4000000;

  SweepConfig cfg;
  cfg.dist = DistributionSpec::parse("gamma:8,1");
  cfg.ys = linear_grid(10.0, 40.0, 61);

  std::printf("kernel,threads,seconds,speedup,identical\n");

  std::string serial_csv;
  const double t_sweep = seconds([&] { serial_csv = to_csv(sweep_serial(cfg)); });
  std::printf("sweep,serial,%.4f,1.00,yes\n", t_sweep);
  for (int t = 1; t <= max_threads; t *= 2) {
    std::string par_csv;
    const double tp = seconds([&] { par_csv = to_csv(sweep_parallel(cfg, t)); });
    std::printf("sweep,%d,%.4f,%.2f,%s\n", t, tp, t_sweep / tp, par_csv == serial_csv ? "yes" : "no");
  }

  const auto spec = DistributionSpec::parse("gamma:8,1");
  std::uint64_t serial_hits = 0;
  const double t_mc = seconds([&] { serial_hits = mc::count_tail_serial(spec, 7, samples, 16.0); });
  std::printf("mc_count,serial,%.4f,1.00,yes\n", t_mc);
  for (int t = 1; t <= max_threads; t *= 2) {
    std::uint64_t hits = 0;
    const double tp = seconds([&] { hits = mc::count_tail_parallel(spec, 7, samples, 16.0, t); });
    std::printf("mc_count,%d,%.4f,%.2f,%s\n", t, tp, t_mc / tp, hits == serial_hits ? "yes" : "no");
  }
  return 0;
}
