// vxhaze command-line tool: synth, fit, render, dehaze, eval and the two
// experiment harnesses. Exit codes: 0 ok, 1 usage, 2 data, 3 numerical.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "manifest.hpp"
#include "options.hpp"
#include "vxhaze/error.hpp"

namespace {

using namespace vxhaze;
using namespace vxhaze::cli;

constexpr int kUsage = 1, kData = 2, kNumerical = 3;

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return kUsage;
    case ErrorCode::kSeriesDiverges:
    case ErrorCode::kDivergence:
      return kNumerical;
    default:
      return kData;
  }
}

void add_scene(CLI::App* app, SceneArgs& s) {
  app->add_option("--views", s.views, "Cameras in the array")->capture_default_str();
  app->add_option("--dims", s.dims, "Grid side length")->capture_default_str();
  app->add_option("--width", s.width, "Image width")->capture_default_str();
  app->add_option("--height", s.height, "Image height")->capture_default_str();
  app->add_option("--layout", s.layout, "ring or grid")->capture_default_str();
  app->add_option("--radius", s.radius, "Camera distance from the box centre")->capture_default_str();
  app->add_option("--elevation", s.elevation, "Ring elevation in degrees (alternating sign)")->capture_default_str();
  app->add_option("--fov", s.fov, "Vertical field of view in degrees")->capture_default_str();
  app->add_option("--boxes", s.boxes)->capture_default_str();
  app->add_option("--spheres", s.spheres)->capture_default_str();
  app->add_flag("--ground-plane", s.ground_plane);
  app->add_option("--texture-frequency", s.texture_frequency)->capture_default_str();
  app->add_option("--object-density", s.object_density)->capture_default_str();
  app->add_option("--haze", s.haze, "none or kind:opacity, kind in uniform|height|blob")->capture_default_str();
  app->add_option("--background", s.background, "r,g,b")->delimiter(',')->expected(3);
  app->add_option("--ambient", s.ambient, "r,g,b")->delimiter(',')->expected(3);
  app->add_option("--reference-step", s.reference_step, "Step for sigma to opacity")->capture_default_str();
  app->add_option("--samples", s.samples, "Samples per ray")->capture_default_str();
}

void add_fit(CLI::App* app, FitArgs& f) {
  app->add_option("--iters", f.iters)->capture_default_str();
  app->add_option("--batch", f.batch, "Rays per step")->capture_default_str();
  app->add_option("--lr-density", f.lr_density)->capture_default_str();
  app->add_option("--lr-color", f.lr_color)->capture_default_str();
  app->add_option("--coarse2fine", f.coarse2fine, "Grid sizes, coarse to fine")->delimiter(',');
  app->add_option("--holdout", f.holdout, "Views kept out for validation")->capture_default_str();
  app->add_option("--tv-weight", f.tv_weight)->capture_default_str();
  app->add_option("--checkpoint-every", f.checkpoint_every)->capture_default_str();
}

void add_sweep(CLI::App* app, SweepArgs& s) {
  app->add_option("--sweep", s.sweep, "lo,hi,count")->delimiter(',')->expected(3);
  app->add_option("--class", s.haze_class, "global or nonglobal")->capture_default_str();
  app->add_option("--sweep-views", s.sweep_views, "Cameras rendered per threshold (0 = all)")->capture_default_str();
  app->add_option("--plateau-eps", s.plateau_eps)->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Voxel radiance-field haze removal toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", VXHAZE_VERSION);

  Globals g;
  bool dump = false;
  app.add_option("--seed", g.seed, "Seed for every random choice")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads (0 = all cores)")->capture_default_str();
  app.add_flag("--deterministic", g.deterministic, "Sequential reductions; bit-reproducible");
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_flag("--dump-config", dump, "Print the resolved configuration as JSON and exit");

  SynthCmd synth;
  auto* s = app.add_subcommand("synth", "Procedural scene, haze and paired clean/hazy datasets");
  add_scene(s, synth.scene);

  FitCmd fit;
  auto* f = app.add_subcommand("fit", "Fit a voxel grid to a dataset");
  f->add_option("--dataset", fit.dataset)->required();
  add_fit(f, fit.fit);

  RenderCmd render;
  auto* r = app.add_subcommand("render", "Render a grid from a dataset's cameras");
  r->add_option("--dataset", render.dataset)->required();
  r->add_option("--grid", render.grid)->required();

  DehazeCmd dehaze;
  auto* d = app.add_subcommand("dehaze", "Threshold sweep, voxel removal and re-render (fits first without --grid)");
  d->add_option("--dataset", dehaze.dataset)->required();
  d->add_option("--grid", dehaze.grid);
  add_sweep(d, dehaze.sweep);
  add_fit(d, dehaze.fit);

  EvalCmd eval;
  auto* e = app.add_subcommand("eval", "PSNR, SSIM and CIEDE2000 between two image sets");
  e->add_option("--ref", eval.ref)->required();
  e->add_option("--test", eval.test)->required();

  ImageCountCmd ic;
  auto* x1 = app.add_subcommand("exp-imagecount", "Fit and dehaze on growing view subsets");
  x1->add_option("--dataset", ic.dataset)->required();
  x1->add_option("--counts", ic.counts)->delimiter(',');
  add_fit(x1, ic.fit);
  add_sweep(x1, ic.sweep);

  ThresholdCmd th;
  auto* x2 = app.add_subcommand("exp-threshold", "Threshold sweeps at several haze levels");
  add_scene(x2, th.scene);
  x2->add_option("--levels", th.levels)->delimiter(',');
  add_fit(x2, th.fit);
  add_sweep(x2, th.sweep);

  std::string manifest_path;
  auto* rp = app.add_subcommand("replay", "Re-run the command recorded in a run manifest");
  rp->add_option("manifest", manifest_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int rc = app.exit(err);
    return rc == 0 ? 0 : kUsage;
  }

  try {
    std::string name;
    json args;
    if (*rp) {
      std::ifstream in(manifest_path);
      require(static_cast<bool>(in), ErrorCode::kMissingFile, "cannot open manifest " + manifest_path);
      const json m = json::parse(in);
      name = m.at("subcommand").get<std::string>();
      args = m.at("config").at("args");
      Globals recorded = m.at("config").at("global").get<Globals>();
      if (app.get_option("--out")->count() > 0) recorded.out = g.out;
      g = recorded;
    } else if (*s) {
      name = "synth", args = synth;
    } else if (*f) {
      name = "fit", args = fit;
    } else if (*r) {
      name = "render", args = render;
    } else if (*d) {
      name = "dehaze", args = dehaze;
    } else if (*e) {
      name = "eval", args = eval;
    } else if (*x1) {
      name = "exp-imagecount", args = ic;
    } else {
      name = "exp-threshold", args = th;
    }
    if (dump) {
      std::cout << json{{"subcommand", name}, {"global", g}, {"args", args}}.dump(2) << '\n';
      return 0;
    }
    return run_command(name, g, args);
  } catch (const Error& err) {
    std::cerr << "vxhaze: " << to_string(err.code()) << ": " << err.what() << '\n';
    return exit_code(err.code());
  } catch (const json::exception& err) {
    std::cerr << "vxhaze: bad manifest: " << err.what() << '\n';
    return kData;
  } catch (const std::filesystem::filesystem_error& err) {
    std::cerr << "vxhaze: " << err.what() << '\n';
    return kData;
  }
}
