// Compares the serial reference ensemble runner against the OpenMP one on a
// medium-size workload and checks that the results agree bit for bit.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "spde1d/mc.hpp"

using namespace spde1d;

namespace {

double time_run(const SimConfig& cfg, const GridFunction& x0, const PathStatistic& stat,
                int M, bool parallel, std::vector<double>& out) {
  const auto t0 = std::chrono::steady_clock::now();
  out = run_ensemble(cfg, x0, stat, M, 20240301, parallel);
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  int M = 256;
  if (argc > 1) M = std::atoi(argv[1]);

  SimConfig cfg = SimConfig::periodic_normal(1.0, 128, 0.0, 1e-4, 0.1);
  cfg.track_eta = false;
  cfg.record_stride = 100;
  const GridFunction x0 = GridFunction::sample(cfg.bc, cfg.n, [](double x) {
    return std::sin(2.0 * M_PI * x);
  });
  const PathStatistic stat = [](const PathRecord& p) {
    return p.l2_trace.back() * p.l2_trace.back();
  };

  std::vector<double> serial, parallel;
  const double ts = time_run(cfg, x0, stat, M, false, serial);
  const double tp = time_run(cfg, x0, stat, M, true, parallel);

  const bool identical =
      std::memcmp(serial.data(), parallel.data(), serial.size() * sizeof(double)) == 0;

  std::printf("ensemble of %d paths, n = %d, %ld steps each\n", M, cfg.n,
              cfg.num_steps());
  std::printf("  serial reference : %8.3f s\n", ts);
  std::printf("  openmp           : %8.3f s\n", tp);
  std::printf("  speedup          : %8.2fx\n", ts / tp);
  std::printf("  bitwise identical: %s\n", identical ? "yes" : "NO");
  return identical ? 0 : 1;
}
