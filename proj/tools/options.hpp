#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "vxhaze/dehaze.hpp"
#include "vxhaze/experiments.hpp"
#include "vxhaze/reconstruction.hpp"

namespace vxhaze::cli {

using nlohmann::json;

struct Globals {
  std::uint64_t seed = 0;
  int threads = 1;
  bool deterministic = false;
  std::string out = "out";
};

struct SceneArgs {
  int views = 20;
  int dims = 64;
  int width = 64;
  int height = 64;
  std::string layout = "ring";
  double radius = 3.2;
  double elevation = 25.0;
  double fov = 50.0;
  int boxes = 2;
  int spheres = 2;
  bool ground_plane = false;
  double texture_frequency = 3.0;
  double object_density = 80.0;
  std::string haze = "uniform:0.1";
  std::vector<double> background = {0.3, 0.35, 0.45};
  std::vector<double> ambient = {0.85, 0.85, 0.85};
  double reference_step = 0.25;
  int samples = 128;
};

struct FitArgs {
  int iters = 1000;
  int batch = 4096;
  double lr_density = 0.1;
  double lr_color = 0.02;
  std::vector<int> coarse2fine = {22, 64};
  int holdout = 0;
  double tv_weight = 0.0;
  int checkpoint_every = 100;
};

struct SweepArgs {
  // lo, hi, count
  std::vector<double> sweep = {0.005, 0.8, 32};
  std::string haze_class = "nonglobal";
  int sweep_views = 8;
  double plateau_eps = 0.005;
};

struct SynthCmd {
  SceneArgs scene;
};

struct FitCmd {
  std::string dataset;
  FitArgs fit;
};

struct RenderCmd {
  std::string dataset;
  std::string grid;
};

struct DehazeCmd {
  std::string dataset;
  // Empty: fit first.
  std::string grid;
  SweepArgs sweep;
  FitArgs fit;
};

struct EvalCmd {
  std::string ref;
  std::string test;
};

struct ImageCountCmd {
  std::string dataset;
  std::vector<int> counts = {4, 6, 8, 10, 12, 14, 16, 18, 20};
  FitArgs fit;
  SweepArgs sweep;
};

struct ThresholdCmd {
  SceneArgs scene;
  std::vector<double> levels = {0.02, 0.05, 0.1, 0.2};
  FitArgs fit;
  SweepArgs sweep;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(Globals, seed, threads, deterministic, out)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(SceneArgs, views, dims, width, height, layout, radius, elevation, fov,
                                                boxes, spheres, ground_plane, texture_frequency, object_density, haze,
                                                background, ambient, reference_step, samples)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(FitArgs, iters, batch, lr_density, lr_color, coarse2fine, holdout,
                                                tv_weight, checkpoint_every)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(SweepArgs, sweep, haze_class, sweep_views, plateau_eps)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(SynthCmd, scene)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(FitCmd, dataset, fit)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(RenderCmd, dataset, grid)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(DehazeCmd, dataset, grid, sweep, fit)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(EvalCmd, ref, test)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ImageCountCmd, dataset, counts, fit, sweep)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ThresholdCmd, scene, levels, fit, sweep)

// Library configs built from parsed arguments.
SynthConfig synth_config(const SceneArgs& a, const Globals& g);
FitConfig fit_config(const FitArgs& a, const Globals& g);
DehazeOptions dehaze_options(const SweepArgs& a);

// Runs a subcommand from its JSON argument block. Returns the process exit
// code; vxhaze::Error propagates to the caller.
int run_command(const std::string& name, const Globals& g, const json& args);

}  // namespace vxhaze::cli
