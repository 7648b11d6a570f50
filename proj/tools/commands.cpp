#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "manifest.hpp"
#include "options.hpp"
#include "plot.hpp"
#include "vxhaze/error.hpp"
#include "vxhaze/io.hpp"
#include "vxhaze/metrics.hpp"
#include "vxhaze/parallel.hpp"

namespace fs = std::filesystem;

namespace vxhaze::cli {
namespace {

Rgb rgb_of(const std::vector<double>& v, const char* what) {
  require(v.size() == 3, ErrorCode::kInvalidArgument, std::string(what) + " needs three components");
  return {v[0], v[1], v[2]};
}

// JSON has no infinity; identical images report "inf".
json number(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : "-inf";
}

std::string fmt(double v) {
  if (!std::isfinite(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string view_stem(int i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "view_%03d", i);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path);
  require(static_cast<bool>(f), ErrorCode::kIo, "cannot write " + path.string());
  f << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json to_json(const MetricTriple& m) {
  return {{"psnr", number(m.psnr)}, {"ssim", m.ssim}, {"ciede2000", m.ciede2000}};
}

json to_json(const FitReport& r) {
  json cps = json::array();
  for (const auto& c : r.checkpoints) {
    cps.push_back({{"iteration", c.iteration},
                   {"loss", c.loss},
                   {"train_psnr", number(c.train_psnr)},
                   {"heldout_psnr", number(c.heldout_psnr)},
                   {"heldout_ssim", c.heldout_ssim}});
  }
  return {{"checkpoints", cps},
          {"occupied_fraction", r.occupied_fraction},
          {"train_views", r.train_views},
          {"heldout_views", r.heldout_views}};
}

json to_json(const ThresholdSweep& s) {
  json j = {{"thresholds", s.thresholds}};
  json ip = json::array(), gp = json::array();
  for (double v : s.interval_psnr) ip.push_back(number(v));
  for (double v : s.gt_psnr) gp.push_back(number(v));
  j["interval_psnr"] = ip;
  j["interval_ssim"] = s.interval_ssim;
  if (!s.gt_psnr.empty()) {
    j["gt_psnr"] = gp;
    j["gt_ssim"] = s.gt_ssim;
  }
  return j;
}

json to_json(const DehazeReport& r) {
  json views = json::array();
  for (const auto& v : r.views) {
    json e = {{"view", v.view}, {"before", to_json(v.before)}, {"after", to_json(v.after)}};
    if (v.before_gt) e["before_gt"] = to_json(*v.before_gt);
    if (v.after_gt) e["after_gt"] = to_json(*v.after_gt);
    views.push_back(e);
  }
  return {{"selected_threshold", r.selected_threshold},
          {"plateau", {r.plateau_begin, r.plateau_end}},
          {"three_phase", r.three_phase},
          {"removed_fraction", r.removed_fraction},
          {"removed_opaque_fraction", r.removed_opaque_fraction},
          {"haze_class", to_string(r.haze_class)},
          {"compensated", r.compensated},
          {"sweep", to_json(r.sweep)},
          {"views", views}};
}

std::string sweep_csv(const ThresholdSweep& s, double selected, const std::string& prefix = "") {
  std::string out;
  for (std::size_t k = 0; k < s.thresholds.size(); ++k) {
    out += prefix + fmt(s.thresholds[k]) + ",";
    if (k < s.intervals()) out += fmt(s.interval_psnr[k]) + "," + fmt(s.interval_ssim[k]);
    else out += ",";
    out += ",";
    if (!s.gt_psnr.empty()) out += fmt(s.gt_psnr[k]) + "," + fmt(s.gt_ssim[k]);
    else out += ",";
    out += std::string(",") + (s.thresholds[k] == selected ? "1" : "0") + "\n";
  }
  return out;
}

// Interval SSIM is plotted at the lower threshold of each interval.
plot::Series interval_series(const ThresholdSweep& s, std::size_t colour) {
  plot::Series p = plot::palette(colour);
  p.x.assign(s.thresholds.begin(), s.thresholds.begin() + static_cast<long>(s.intervals()));
  p.y = s.interval_ssim;
  return p;
}

void write_images(const fs::path& dir, const std::vector<ImageBuffer>& images, RunManifest& m) {
  fs::create_directories(dir);
  for (std::size_t i = 0; i < images.size(); ++i) {
    const std::string stem = view_stem(static_cast<int>(i));
    write_pfm(dir / (stem + ".pfm"), images[i]);
    write_png(dir / (stem + ".png"), images[i]);
  }
  m.output(dir);
}

std::vector<ImageBuffer> load_images(const fs::path& dir) {
  require(fs::is_directory(dir), ErrorCode::kMissingFile, "not a directory: " + dir.string());
  std::vector<ImageBuffer> out;
  if (fs::exists(dir / "dataset.json")) {
    for (View& v : read_dataset(dir).views) out.push_back(std::move(v.image));
    return out;
  }
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() == ".pfm") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) out.push_back(read_pfm(f));
  require(!out.empty(), ErrorCode::kMissingFile, "no .pfm images in " + dir.string());
  return out;
}

int threads_of(const Globals& g) { return resolve_threads(g.threads); }

FitResult run_fit(const MultiViewDataset& ds, const FitArgs& a, const Globals& g, RunManifest& m) {
  const RenderConfig rc = render_config_for(ds.meta, threads_of(g));
  return m.stage("fit", [&] { return fit_grid(ds, fit_config(a, g), rc); });
}

int cmd_synth(const Globals& g, const SynthCmd& c) {
  const fs::path out = g.out;
  RunManifest m(out, "synth", g, c);
  const SynthConfig sc = synth_config(c.scene, g);
  if (c.scene.views < 2) {
    m.warn("insufficient for fitting: " + std::to_string(c.scene.views) + " view(s), fitting needs at least 2");
  }
  const SynthOutput s = m.stage("generate", [&] { return synthesize(sc); });
  m.stage("write", [&] {
    write_dataset(out / "clean", s.clean);
    write_dataset(out / "hazy", s.hazy);
    write_grid(out / "clean_grid.vx", s.clean_grid);
    write_grid(out / "hazy_grid.vx", s.hazy_grid);
  });
  for (const char* p : {"clean", "hazy", "clean_grid.vx", "hazy_grid.vx"}) m.output(out / p);
  m.save();
  return 0;
}

int cmd_fit(const Globals& g, const FitCmd& c) {
  // --out may name the grid file itself.
  fs::path dir = g.out, grid = fs::path(g.out) / "grid.vx";
  if (fs::path(g.out).extension() == ".vx") {
    grid = g.out;
    dir = grid.has_parent_path() ? grid.parent_path() : fs::path(".");
  }
  RunManifest m(dir, "fit", g, c);
  m.input(c.dataset);
  const MultiViewDataset ds = m.stage("load", [&] { return read_dataset(c.dataset); });
  const FitResult r = run_fit(ds, c.fit, g, m);
  m.stage("write", [&] {
    write_grid(grid, r.grid);
    write_json(dir / "fit_report.json", to_json(r.report));
  });
  m.output(grid);
  m.output(dir / "fit_report.json");
  m.save();
  return 0;
}

int cmd_render(const Globals& g, const RenderCmd& c) {
  const fs::path out = g.out;
  RunManifest m(out, "render", g, c);
  m.input(c.dataset);
  m.input(c.grid);
  const MultiViewDataset ds = m.stage("load", [&] { return read_dataset(c.dataset); });
  const VoxelGrid grid = read_grid(c.grid);
  std::vector<CameraModel> cams;
  for (const View& v : ds.views) cams.push_back(v.camera);
  const auto images = m.stage("render", [&] { return render_views(grid, cams, render_config_for(ds.meta, threads_of(g))); });
  m.stage("write", [&] { write_images(out, images, m); });
  m.save();
  return 0;
}

int cmd_dehaze(const Globals& g, const DehazeCmd& c) {
  const fs::path out = g.out;
  RunManifest m(out, "dehaze", g, c);
  m.input(c.dataset);
  const MultiViewDataset ds = m.stage("load", [&] { return read_dataset(c.dataset); });
  const RenderConfig rc = render_config_for(ds.meta, threads_of(g));
  const VoxelGrid grid = [&] {
    if (!c.grid.empty()) {
      m.input(c.grid);
      return read_grid(c.grid);
    }
    FitResult r = run_fit(ds, c.fit, g, m);
    write_grid(out / "grid.vx", r.grid);
    write_json(out / "fit_report.json", to_json(r.report));
    m.output(out / "grid.vx");
    m.output(out / "fit_report.json");
    return std::move(r.grid);
  }();
  std::vector<ImageBuffer> reference;
  if (ds.ground_truth) reference = ground_truth_images(ds, rc);
  const DehazeResult res = m.stage("dehaze", [&] { return dehaze_grid(grid, ds, rc, dehaze_options(c.sweep), reference); });

  m.stage("write", [&] {
    const auto& rep = res.report;
    write_grid(out / "dehazed_grid.vx", res.dehazed);
    write_json(out / "dehaze_report.json", to_json(rep));
    write_text(out / "sweep.csv", "threshold,interval_psnr,interval_ssim,gt_psnr,gt_ssim,selected\n" +
                                      sweep_csv(rep.sweep, rep.selected_threshold));
    plot::Chart ch;
    ch.log_x = true;
    ch.series.push_back(interval_series(rep.sweep, 0));
    ch.markers.push_back(rep.selected_threshold);
    plot::write(out / "sweep.png", ch);
    write_images(out / "before", res.fitted_renders, m);
    write_images(out / "after", res.images, m);
  });
  for (const char* p : {"dehazed_grid.vx", "dehaze_report.json", "sweep.csv", "sweep.png"}) m.output(out / p);
  m.save();
  return 0;
}

int cmd_eval(const Globals& g, const EvalCmd& c) {
  const fs::path out = g.out;
  RunManifest m(out, "eval", g, c);
  m.input(c.ref);
  m.input(c.test);
  const auto ref = m.stage("load", [&] { return load_images(c.ref); });
  const auto test = load_images(c.test);
  require(ref.size() == test.size(), ErrorCode::kDimsMismatch,
          "reference has " + std::to_string(ref.size()) + " images, test has " + std::to_string(test.size()));
  std::vector<MetricTriple> per(ref.size());
  m.stage("metrics", [&] {
    for (std::size_t i = 0; i < ref.size(); ++i) per[i] = compare(ref[i], test[i]);
  });
  MetricTriple mean{0.0, 0.0, 0.0};
  for (const auto& t : per) {
    mean.psnr += t.psnr;
    mean.ssim += t.ssim;
    mean.ciede2000 += t.ciede2000;
  }
  const double n = static_cast<double>(per.size());
  mean = {mean.psnr / n, mean.ssim / n, mean.ciede2000 / n};

  json views = json::array();
  std::string csv = "view,psnr,ssim,ciede2000\n";
  for (std::size_t i = 0; i < per.size(); ++i) {
    json v = to_json(per[i]);
    v["view"] = i;
    views.push_back(v);
    csv += std::to_string(i) + "," + fmt(per[i].psnr) + "," + fmt(per[i].ssim) + "," + fmt(per[i].ciede2000) + "\n";
  }
  csv += "mean," + fmt(mean.psnr) + "," + fmt(mean.ssim) + "," + fmt(mean.ciede2000) + "\n";
  write_json(out / "eval.json", {{"views", views}, {"mean", to_json(mean)}});
  write_text(out / "eval.csv", csv);
  m.output(out / "eval.json");
  m.output(out / "eval.csv");
  m.save();
  return 0;
}

int cmd_imagecount(const Globals& g, const ImageCountCmd& c) {
  const fs::path out = g.out;
  RunManifest m(out, "exp-imagecount", g, c);
  m.input(c.dataset);
  const MultiViewDataset ds = m.stage("load", [&] { return read_dataset(c.dataset); });
  require(ds.ground_truth.has_value(), ErrorCode::kMissingFile,
          "dataset " + c.dataset + " has no ground truth; the image-count experiment needs one");
  const int n = static_cast<int>(ds.views.size());
  for (int k : c.counts) {
    require(k >= 2 && k <= n, ErrorCode::kInvalidArgument,
            "view count " + std::to_string(k) + " not in dataset (" + std::to_string(n) + " views)");
  }
  std::vector<ImageCountRow> rows;
  for (int k : c.counts) {
    const int one[] = {k};
    auto r = m.stage("views " + std::to_string(k), [&] {
      return run_imagecount(ds, one, fit_config(c.fit, g), dehaze_options(c.sweep), threads_of(g));
    });
    rows.push_back(r.front());
  }

  std::string head = "series";
  std::map<std::string, std::string> line;
  json jrows = json::array();
  for (const auto& r : rows) {
    head += "," + std::to_string(r.views);
    line["haze_psnr"] += "," + fmt(r.haze_psnr);
    line["haze_ssim"] += "," + fmt(r.haze_ssim);
    line["dehaze_psnr"] += "," + fmt(r.dehaze_psnr);
    line["dehaze_ssim"] += "," + fmt(r.dehaze_ssim);
    line["threshold"] += "," + fmt(r.threshold);
    jrows.push_back({{"views", r.views},
                     {"haze_psnr", number(r.haze_psnr)},
                     {"haze_ssim", r.haze_ssim},
                     {"dehaze_psnr", number(r.dehaze_psnr)},
                     {"dehaze_ssim", r.dehaze_ssim},
                     {"threshold", r.threshold}});
  }
  std::string csv = head + "\n";
  for (const char* key : {"haze_psnr", "haze_ssim", "dehaze_psnr", "dehaze_ssim", "threshold"}) {
    csv += key + line[key] + "\n";
  }
  write_text(out / "imagecount.csv", csv);
  write_json(out / "imagecount.json", {{"rows", jrows}});

  plot::Chart ch;
  plot::Series haze = plot::palette(1), dehaze = plot::palette(0);
  for (const auto& r : rows) {
    haze.x.push_back(r.views);
    haze.y.push_back(r.haze_psnr);
    dehaze.x.push_back(r.views);
    dehaze.y.push_back(r.dehaze_psnr);
  }
  ch.series = {haze, dehaze};
  plot::write(out / "imagecount.png", ch);
  for (const char* p : {"imagecount.csv", "imagecount.json", "imagecount.png"}) m.output(out / p);
  m.save();
  return 0;
}

int cmd_threshold(const Globals& g, const ThresholdCmd& c) {
  const fs::path out = g.out;
  RunManifest m(out, "exp-threshold", g, c);
  const SynthConfig base = synth_config(c.scene, g);
  std::vector<ThresholdLevel> levels;
  for (double level : c.levels) {
    const double one[] = {level};
    auto r = m.stage("level " + fmt(level), [&] {
      return run_threshold_experiment(base, one, fit_config(c.fit, g), dehaze_options(c.sweep));
    });
    levels.push_back(std::move(r.front()));
  }

  std::string curves = "level,threshold,interval_psnr,interval_ssim,gt_psnr,gt_ssim,selected\n";
  std::string summary =
      "level,hazy_psnr,selected_threshold,selected_gt_psnr,best_gt_threshold,best_gt_psnr,plateau_begin,"
      "plateau_end,three_phase\n";
  json jl = json::array();
  plot::Chart interval, gt;
  interval.log_x = gt.log_x = true;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const auto& l = levels[i];
    const auto& rep = l.report;
    curves += sweep_csv(rep.sweep, rep.selected_threshold, fmt(l.haze_opacity) + ",");
    summary += fmt(l.haze_opacity) + "," + fmt(l.hazy_psnr) + "," + fmt(rep.selected_threshold) + "," +
               fmt(l.selected_gt_psnr) + "," + fmt(l.best_gt_threshold) + "," + fmt(l.best_gt_psnr) + "," +
               std::to_string(rep.plateau_begin) + "," + std::to_string(rep.plateau_end) + "," +
               (rep.three_phase ? "1" : "0") + "\n";
    jl.push_back({{"level", l.haze_opacity},
                  {"hazy_psnr", number(l.hazy_psnr)},
                  {"selected_gt_psnr", number(l.selected_gt_psnr)},
                  {"best_gt_psnr", number(l.best_gt_psnr)},
                  {"best_gt_threshold", l.best_gt_threshold},
                  {"report", to_json(rep)}});
    interval.series.push_back(interval_series(rep.sweep, i));
    interval.markers.push_back(rep.selected_threshold);
    plot::Series s = plot::palette(i);
    s.x = rep.sweep.thresholds;
    s.y = rep.sweep.gt_psnr;
    gt.series.push_back(s);
    gt.markers.push_back(rep.selected_threshold);
  }
  write_text(out / "threshold_curves.csv", curves);
  write_text(out / "threshold_summary.csv", summary);
  write_json(out / "threshold.json", {{"levels", jl}});
  plot::write(out / "threshold_interval_ssim.png", interval);
  plot::write(out / "threshold_gt_psnr.png", gt);
  for (const char* p : {"threshold_curves.csv", "threshold_summary.csv", "threshold.json",
                        "threshold_interval_ssim.png", "threshold_gt_psnr.png"}) {
    m.output(out / p);
  }
  m.save();
  return 0;
}

}  // namespace

SynthConfig synth_config(const SceneArgs& a, const Globals& g) {
  SynthConfig sc;
  sc.scene.seed = g.seed;
  sc.scene.boxes = a.boxes;
  sc.scene.spheres = a.spheres;
  sc.scene.ground_plane = a.ground_plane;
  sc.scene.texture_frequency = a.texture_frequency;
  sc.scene.object_density = a.object_density;
  sc.scene.dims = {a.dims, a.dims, a.dims};
  auto& cam = sc.scene.cameras;
  require(a.layout == "ring" || a.layout == "grid", ErrorCode::kInvalidArgument, "layout must be ring or grid");
  cam.layout = a.layout == "ring" ? CameraLayout::kRing : CameraLayout::kGrid;
  cam.count = a.views;
  cam.radius = a.radius;
  cam.elevation_deg = a.elevation;
  cam.width = a.width;
  cam.height = a.height;
  cam.fov_deg = a.fov;
  sc.set_haze(a.haze);
  sc.background = rgb_of(a.background, "background");
  sc.ambient = rgb_of(a.ambient, "ambient");
  sc.reference_step = a.reference_step;
  sc.samples_per_ray = a.samples;
  sc.threads = threads_of(g);
  return sc;
}

FitConfig fit_config(const FitArgs& a, const Globals& g) {
  FitConfig fc;
  fc.iterations = a.iters;
  fc.batch = a.batch;
  fc.lr_density = a.lr_density;
  fc.lr_color = a.lr_color;
  fc.coarse_to_fine = a.coarse2fine;
  fc.holdout = a.holdout;
  fc.tv_weight = a.tv_weight;
  fc.checkpoint_every = a.checkpoint_every;
  fc.seed = g.seed;
  fc.deterministic = g.deterministic;
  fc.threads = g.deterministic ? 1 : threads_of(g);
  fc.validate();
  return fc;
}

DehazeOptions dehaze_options(const SweepArgs& a) {
  require(a.sweep.size() == 3, ErrorCode::kInvalidArgument, "sweep takes lo,hi,count");
  DehazeOptions o;
  o.sweep.lo = a.sweep[0];
  o.sweep.hi = a.sweep[1];
  require(a.sweep[2] == std::floor(a.sweep[2]), ErrorCode::kInvalidArgument, "sweep count must be an integer");
  o.sweep.count = static_cast<int>(a.sweep[2]);
  o.haze_class = parse_haze_class(a.haze_class);
  o.sweep_views = a.sweep_views;
  o.plateau_eps = a.plateau_eps;
  return o;
}

int run_command(const std::string& name, const Globals& g, const json& args) {
  if (name == "synth") return cmd_synth(g, args.get<SynthCmd>());
  if (name == "fit") return cmd_fit(g, args.get<FitCmd>());
  if (name == "render") return cmd_render(g, args.get<RenderCmd>());
  if (name == "dehaze") return cmd_dehaze(g, args.get<DehazeCmd>());
  if (name == "eval") return cmd_eval(g, args.get<EvalCmd>());
  if (name == "exp-imagecount") return cmd_imagecount(g, args.get<ImageCountCmd>());
  if (name == "exp-threshold") return cmd_threshold(g, args.get<ThresholdCmd>());
  fail(ErrorCode::kInvalidArgument, "unknown subcommand '" + name + "'");
}

}  // namespace vxhaze::cli
