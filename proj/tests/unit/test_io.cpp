#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "vxhaze/experiments.hpp"
#include "vxhaze/io.hpp"

using namespace vxhaze;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void spit(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary);
  out << bytes;
}

}  // namespace

TEST_CASE("2x2x2 zero grid round-trips") {
  const auto dir = testing::scratch_dir("grid_zero");
  const VoxelGrid g({2, 2, 2}, {});
  write_grid(dir / "g.vx", g);
  CHECK(read_grid(dir / "g.vx") == g);
}

TEST_CASE("64^3 random grid round-trips bit-exactly") {
  const auto dir = testing::scratch_dir("grid_random");
  VoxelGrid g = testing::random_grid({64, 64, 64}, 1234);
  write_grid(dir / "a.vx", g);
  const VoxelGrid back = read_grid(dir / "a.vx");
  CHECK(back == g);
  write_grid(dir / "b.vx", back);
  CHECK(slurp(dir / "a.vx") == slurp(dir / "b.vx"));
}

TEST_CASE("grid reader distinguishes bad magic, truncation and dims mismatch") {
  const auto dir = testing::scratch_dir("grid_errors");
  write_grid(dir / "g.vx", testing::random_grid({3, 4, 5}, 9));
  const std::string good = slurp(dir / "g.vx");

  std::string bad = good;
  bad[0] = 'X';
  spit(dir / "magic.vx", bad);
  CHECK_ERROR_CODE(read_grid(dir / "magic.vx"), ErrorCode::kBadMagic);

  spit(dir / "short.vx", good.substr(0, good.size() - 7));
  CHECK_ERROR_CODE(read_grid(dir / "short.vx"), ErrorCode::kTruncated);

  spit(dir / "long.vx", good + std::string(16, '\0'));
  CHECK_ERROR_CODE(read_grid(dir / "long.vx"), ErrorCode::kDimsMismatch);

  CHECK_ERROR_CODE(read_grid(dir / "absent.vx"), ErrorCode::kMissingFile);
}

TEST_CASE("PFM round-trips and keeps row order") {
  const auto dir = testing::scratch_dir("pfm");
  ImageBuffer img(5, 3);
  for (int y = 0; y < 3; ++y)
    for (int x = 0; x < 5; ++x) img.set(x, y, {0.1 * x, 0.3 * y, 0.25});
  write_pfm(dir / "i.pfm", img);
  CHECK(read_pfm(dir / "i.pfm") == img);
}

TEST_CASE("1-view dataset round-trips") {
  const auto dir = testing::scratch_dir("ds_one");
  MultiViewDataset ds;
  const CameraModel cam = CameraModel::look_at(Intrinsics::from_fov(6, 4, 45.0), {0, 0, 3}, {0, 0, 0});
  ds.views.push_back({cam, ImageBuffer(6, 4, {0.2, 0.3, 0.4})});
  ds.meta.scene_id = "one";
  ds.meta.background = {0.1, 0.2, 0.3};
  write_dataset(dir, ds);
  const MultiViewDataset back = read_dataset(dir);
  REQUIRE(back.views.size() == 1);
  CHECK(back.views[0].image == ds.views[0].image);
  CHECK(back.views[0].camera == cam);
  CHECK(back.meta.scene_id == "one");
  CHECK(back.meta.background == ds.meta.background);
  CHECK_FALSE(back.ground_truth.has_value());
}

TEST_CASE("dataset with a missing image names the view") {
  const auto dir = testing::scratch_dir("ds_missing");
  MultiViewDataset ds;
  const CameraModel cam = CameraModel::look_at(Intrinsics::from_fov(4, 4, 45.0), {0, 0, 3}, {0, 0, 0});
  for (int i = 0; i < 3; ++i) ds.views.push_back({cam, ImageBuffer(4, 4)});
  write_dataset(dir, ds);
  fs::remove(dir / "view_002.pfm");
  try {
    read_dataset(dir);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMissingFile);
    CHECK(std::string(e.what()).find("view 2") != std::string::npos);
  }
}

TEST_CASE("20-view synthetic dataset keeps PFM payloads byte-identical") {
  SynthConfig cfg;
  cfg.scene.dims = {24, 24, 24};
  cfg.scene.cameras.count = 20;
  cfg.scene.cameras.width = cfg.scene.cameras.height = 16;
  cfg.samples_per_ray = 32;
  cfg.set_haze("uniform:0.05");
  const SynthOutput s = synthesize(cfg);
  const auto a = testing::scratch_dir("ds20_a");
  const auto b = testing::scratch_dir("ds20_b");
  write_dataset(a, s.hazy);
  const MultiViewDataset back = read_dataset(a);
  write_dataset(b, back);
  REQUIRE(back.views.size() == 20);
  for (int i = 0; i < 20; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "view_%03d.pfm", i);
    CHECK(std::hash<std::string>{}(slurp(a / name)) == std::hash<std::string>{}(slurp(b / name)));
    CHECK(back.views[static_cast<std::size_t>(i)].camera == s.hazy.views[static_cast<std::size_t>(i)].camera);
  }
  REQUIRE(back.ground_truth.has_value());
  CHECK(*back.ground_truth == s.clean_grid);
  CHECK(slurp(a / "dataset.json") == slurp(b / "dataset.json"));
}
