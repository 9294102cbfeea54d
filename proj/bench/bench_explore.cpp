// Compares the serial reference explorer against the OpenMP engine on a
// scenario's full state space and checks they agree exactly.
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "defimc/harness.hpp"

using namespace defimc;

namespace {

double run_once(const System& sys, const PropertySpec& prop, int workers, Verdict* out) {
  ExploreOptions opts;
  opts.workers = workers;
  opts.early_stop = false;  // force a full sweep so the comparison is fair
  auto t0 = std::chrono::steady_clock::now();
  Verdict v = check_property(sys, prop, opts);
  auto t1 = std::chrono::steady_clock::now();
  if (out) *out = v;
  return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  ScenarioConfig cfg;
  if (argc > 1) {
    std::ifstream in(argv[1]);
    if (!in) {
      std::fprintf(stderr, "cannot open %s\n", argv[1]);
      return 2;
    }
    std::ostringstream os;
    os << in.rdbuf();
    cfg = ScenarioConfig::parse(os.str());
  } else {
    cfg = ScenarioConfig::default_scenario();
  }
  int max_workers = argc > 2 ? std::atoi(argv[2]) : 4;

  BuiltSystem built = build_system(cfg);
  const PropertySpec& prop = built.properties.front();

  Verdict ref;
  double t_serial = run_once(built.system, prop, 1, &ref);
  std::printf("serial    : %8.3fs  states=%llu transitions=%llu status=%s\n", t_serial,
              static_cast<unsigned long long>(ref.stats.states_visited),
              static_cast<unsigned long long>(ref.stats.transitions_taken), to_string(ref.status));

  for (int w = 2; w <= max_workers; w *= 2) {
    Verdict v;
    double t = run_once(built.system, prop, w, &v);
    bool same = v.status == ref.status && v.stats.states_visited == ref.stats.states_visited &&
                v.stats.transitions_taken == ref.stats.transitions_taken;
    std::printf("workers=%-2d: %8.3fs  speedup=%.2fx  %s\n", w, t, t_serial / t,
                same ? "results match" : "RESULTS DIFFER");
    if (!same) return 1;
  }
  return 0;
}
