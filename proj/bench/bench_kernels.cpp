// Parallel kernels against their serial references. Usage: bench_kernels [reps]

#include "firesig/features.hpp"
#include "firesig/forest.hpp"
#include "firesig/parallel.hpp"
#include "firesig/pipeline.hpp"
#include "firesig/scene3d.hpp"
#include "firesig/signature.hpp"
#include "firesig/synth.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <functional>

using namespace firesig;

namespace {

double best_of(int reps, const std::function<void()>& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

void row(const char* name, int reps, const std::function<void()>& par, const std::function<void()>& ser) {
  const double p = best_of(reps, par);
  const double s = best_of(reps, ser);
  fmt::print("{:<28} {:>10.2f} {:>10.2f} {:>8.2f}x\n", name, 1e3 * p, 1e3 * s, s / p);
}

}  // namespace

int main(int argc, char** argv) {
  const int reps = argc > 1 ? std::max(1, std::atoi(argv[1])) : 3;
  fmt::print("threads: {}, best of {}\n", max_threads(), reps);
  fmt::print("{:<28} {:>10} {:>10} {:>9}\n", "kernel", "par ms", "serial ms", "speedup");

  SynthConfig cfg;
  cfg.seed = 1;
  cfg.n_per_class = 40;
  ShapeMask mask;
  generate_sample(cfg, PatternClass::Hourglass, 0, mask);
  row("signature (ray)", reps, [&] { aspect_signature(mask); }, [&] { serial::aspect_signature(mask); });
  row("signature (line)", reps, [&] { aspect_signature(mask, ChordMode::FullLine); },
      [&] { serial::aspect_signature(mask, ChordMode::FullLine); });

  row("generate 8x40 masks", reps, [&] { generate_dataset(cfg); }, [&] { serial::generate_dataset(cfg); });

  const auto ds = generate_dataset(cfg);
  const auto rows = feature_rows(ds.masks, FeatureConfig{});
  const auto split = stratified_split(ds.records, Grouping::Seven, 0.7, 0);
  const auto data = make_training_set(ds.records, rows, split.train, Grouping::Seven);
  ForestParams fp;
  fp.n_trees = 50;
  row("train 50 trees", reps, [&] { train(data, fp, 0); }, [&] { serial::train(data, fp, 0); });

  RoomSpec rs;
  rs.outlier_frac = 0.2;
  const auto room = make_box_room(rs);
  SegmentConfig sc;
  row("RANSAC box room", reps, [&] { segment_planes(room.cloud, sc); },
      [&] { serial::segment_planes(room.cloud, sc); });
}
