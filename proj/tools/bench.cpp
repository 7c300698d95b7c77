// Compares the OpenMP table builders against the serial reference
// implementations and reports speedups. The outputs must be bit-identical;
// the comparison aborts if they are not.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "cpf/cohesive_law.hpp"
#include "cpf/envelope.hpp"
#include "cpf/model.hpp"
#include "cpf/parallel.hpp"

namespace {

double now_s() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

template <class F>
double timed(const char* label, F&& fn) {
  const double t0 = now_s();
  fn();
  const double dt = now_s() - t0;
  std::printf("  %-28s %8.3f s\n", label, dt);
  return dt;
}

} // namespace

int main(int argc, char** argv) {
  const int threads = argc > 1 ? std::atoi(argv[1]) : 0;
  cpf::set_threads(threads);
  std::printf("benchmark with %d thread(s)\n", cpf::threads());

  const cpf::Model cfi = cpf::make_cfi_model();
  const cpf::SigmaBar sb = cpf::sigma_bar(cfi);

  std::printf("envelope build (n=4096):\n");
  cpf::EnvelopeTable env_p, env_s;
  const double tp = timed("parallel", [&] { env_p = cpf::build_envelope(cfi, sb, 10.0, 4096); });
  const double ts = timed("serial reference", [&] {
    env_s = cpf::build_envelope_serial(cfi, sb, 10.0, 4096);
  });
  for (std::size_t i = 0; i < env_p.hull.size(); ++i)
    if (env_p.hull[i] != env_s.hull[i] || env_p.raw[i] != env_s.raw[i]) {
      std::fprintf(stderr, "mismatch at grid index %zu\n", i);
      return 1;
    }
  std::printf("  speedup %.2fx, outputs identical\n", ts / tp);

  std::printf("cohesive law table (24 points):\n");
  std::vector<double> grid;
  grid.push_back(0.0);
  for (int i = 0; i < 23; ++i)
    grid.push_back(1e-2 * std::pow(4.0 / 1e-2, i / 22.0));
  cpf::LawOptimConfig cfg;
  cfg.nodes = 201;
  cfg.max_iters = 1200;
  cpf::CohesiveLawTable law_p, law_s;
  const double lp =
      timed("parallel", [&] { law_p = cpf::build_law_table(cfi, grid, 1e-2, cfg); });
  const double ls = timed("serial reference", [&] {
    law_s = cpf::build_law_table_serial(cfi, grid, 1e-2, cfg);
  });
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (law_p.g[i] != law_s.g[i] || law_p.geta[i] != law_s.geta[i]) {
      std::fprintf(stderr, "mismatch at s index %zu\n", i);
      return 1;
    }
  std::printf("  speedup %.2fx, outputs identical\n", ls / lp);
  return 0;
}
