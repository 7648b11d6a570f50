#include "vxhaze/io.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>
#include <sstream>
#include <string>

#include "json.hpp"
#include "vxhaze/error.hpp"

namespace vxhaze {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::array<char, 8> kGridMagic = {'V', 'X', 'G', 'R', 'I', 'D', '0', '1'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

void put_f32(std::string& out, float f) { put_u32(out, std::bit_cast<std::uint32_t>(f)); }

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

float get_f32(const unsigned char* p) { return std::bit_cast<float>(get_u32(p)); }

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kMissingFile, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::kIo, "short write to " + path.string());
}

}  // namespace

void write_grid(const fs::path& path, const VoxelGrid& grid) {
  const GridDims& d = grid.dims();
  std::string out;
  out.reserve(8 + 12 + 24 + 16 * grid.voxel_count());
  out.append(kGridMagic.data(), kGridMagic.size());
  put_u32(out, static_cast<std::uint32_t>(d.nx));
  put_u32(out, static_cast<std::uint32_t>(d.ny));
  put_u32(out, static_cast<std::uint32_t>(d.nz));
  for (int a = 0; a < 3; ++a) put_f32(out, static_cast<float>(grid.bbox().min[a]));
  for (int a = 0; a < 3; ++a) put_f32(out, static_cast<float>(grid.bbox().max[a]));
  const auto dens = grid.densities();
  const auto col = grid.colors();
  for (std::size_t i = 0; i < grid.voxel_count(); ++i) {
    put_f32(out, dens[i]);
    put_f32(out, col[3 * i]);
    put_f32(out, col[3 * i + 1]);
    put_f32(out, col[3 * i + 2]);
  }
  spit(path, out);
}

VoxelGrid read_grid(const fs::path& path) {
  const std::string bytes = slurp(path);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  if (bytes.size() < kGridMagic.size() || std::memcmp(p, kGridMagic.data(), kGridMagic.size()) != 0) {
    fail(ErrorCode::kBadMagic, "bad magic in " + path.string());
  }
  constexpr std::size_t kHeader = 8 + 12 + 24;
  if (bytes.size() < kHeader) fail(ErrorCode::kTruncated, "truncated header in " + path.string());
  const std::uint32_t nx = get_u32(p + 8);
  const std::uint32_t ny = get_u32(p + 12);
  const std::uint32_t nz = get_u32(p + 16);
  if (nx < 2 || ny < 2 || nz < 2 || nx > 4096 || ny > 4096 || nz > 4096) {
    fail(ErrorCode::kDimsMismatch, "invalid grid dims in " + path.string());
  }
  const std::size_t count = std::size_t{nx} * ny * nz;
  const std::size_t expected = kHeader + 16 * count;
  if (bytes.size() < expected) fail(ErrorCode::kTruncated, "truncated payload in " + path.string());
  if (bytes.size() > expected) {
    fail(ErrorCode::kDimsMismatch, "payload larger than dims imply in " + path.string());
  }
  Aabb box;
  for (int a = 0; a < 3; ++a) {
    box.min[a] = get_f32(p + 20 + 4 * a);
    box.max[a] = get_f32(p + 32 + 4 * a);
  }
  VoxelGrid grid({static_cast<int>(nx), static_cast<int>(ny), static_cast<int>(nz)}, box);
  auto dens = grid.densities();
  auto col = grid.colors();
  const unsigned char* rec = p + kHeader;
  for (std::size_t i = 0; i < count; ++i, rec += 16) {
    dens[i] = get_f32(rec);
    col[3 * i] = get_f32(rec + 4);
    col[3 * i + 1] = get_f32(rec + 8);
    col[3 * i + 2] = get_f32(rec + 12);
  }
  grid.validate();
  return grid;
}

void write_pfm(const fs::path& path, const ImageBuffer& image) {
  std::string out = "PF\n" + std::to_string(image.width()) + " " + std::to_string(image.height()) + "\n-1.0\n";
  const auto data = image.data();
  out.reserve(out.size() + 4 * data.size());
  for (int y = image.height() - 1; y >= 0; --y) {
    const std::size_t row = 3 * static_cast<std::size_t>(y) * image.width();
    for (std::size_t i = 0; i < 3 * static_cast<std::size_t>(image.width()); ++i) put_f32(out, data[row + i]);
  }
  spit(path, out);
}

ImageBuffer read_pfm(const fs::path& path) {
  const std::string bytes = slurp(path);
  std::istringstream header(bytes);
  std::string magic;
  int width = 0;
  int height = 0;
  double scale = 0.0;
  header >> magic >> width >> height >> scale;
  if (magic != "PF") fail(ErrorCode::kBadMagic, "not a colour PFM: " + path.string());
  if (!header || width < 1 || height < 1) fail(ErrorCode::kTruncated, "bad PFM header in " + path.string());
  if (scale >= 0.0) fail(ErrorCode::kInvalidArgument, "big-endian PFM not supported: " + path.string());
  header.get();  // single whitespace after the scale
  const auto offset = static_cast<std::size_t>(header.tellg());
  const std::size_t floats = 3 * static_cast<std::size_t>(width) * height;
  if (bytes.size() < offset + 4 * floats) fail(ErrorCode::kTruncated, "truncated PFM payload in " + path.string());
  ImageBuffer image(width, height);
  auto data = image.data();
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data()) + offset;
  for (int y = height - 1; y >= 0; --y) {
    const std::size_t row = 3 * static_cast<std::size_t>(y) * width;
    for (std::size_t i = 0; i < 3 * static_cast<std::size_t>(width); ++i, p += 4) data[row + i] = get_f32(p);
  }
  return image;
}

double linear_to_srgb(double v) {
  v = std::clamp(v, 0.0, 1.0);
  return v <= 0.0031308 ? 12.92 * v : 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
}

double srgb_to_linear(double v) {
  return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}

void write_png(const fs::path& path, const ImageBuffer& image) {
  std::unique_ptr<FILE, int (*)(FILE*)> file(std::fopen(path.c_str(), "wb"), &std::fclose);
  if (!file) fail(ErrorCode::kIo, "cannot write " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    fail(ErrorCode::kIo, "libpng initialisation failed");
  }
  std::vector<unsigned char> rows(3 * image.pixel_count());
  const auto data = image.data();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i] = static_cast<unsigned char>(std::lround(255.0 * linear_to_srgb(data[i])));
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail(ErrorCode::kIo, "libpng error writing " + path.string());
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width()), static_cast<png_uint_32>(image.height()), 8,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_set_sRGB_gAMA_and_cHRM(png, info, PNG_sRGB_INTENT_PERCEPTUAL);
  png_write_info(png, info);
  for (int y = 0; y < image.height(); ++y) {
    png_write_row(png, rows.data() + 3 * static_cast<std::size_t>(y) * image.width());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

namespace {

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 json_vec(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()}; }

std::string view_stem(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "view_%03zu", i);
  return buf;
}

}  // namespace

void write_dataset(const fs::path& dir, const MultiViewDataset& dataset) {
  dataset.validate();
  fs::create_directories(dir);
  json manifest;
  manifest["scene_id"] = dataset.meta.scene_id;
  manifest["seed"] = dataset.meta.seed;
  manifest["haze_kind"] = dataset.meta.haze_kind;
  manifest["bbox"] = {{"min", vec_json(dataset.meta.bbox.min)}, {"max", vec_json(dataset.meta.bbox.max)}};
  manifest["background"] = vec_json(dataset.meta.background);
  manifest["reference_step"] = dataset.meta.reference_step;
  manifest["samples_per_ray"] = dataset.meta.samples_per_ray;
  manifest["ground_truth_grid"] = nullptr;
  if (dataset.ground_truth) {
    write_grid(dir / "ground_truth.vx", *dataset.ground_truth);
    manifest["ground_truth_grid"] = "ground_truth.vx";
  }
  json views = json::array();
  for (std::size_t i = 0; i < dataset.views.size(); ++i) {
    const View& v = dataset.views[i];
    const std::string stem = view_stem(i);
    write_pfm(dir / (stem + ".pfm"), v.image);
    write_png(dir / (stem + ".png"), v.image);
    const Intrinsics& k = v.camera.intrinsics();
    const Pose& pose = v.camera.pose();
    json m = json::array();
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) {
        if (r < 3) {
          m.push_back(c < 3 ? pose.rotation(r, c) : pose.translation[r]);
        } else {
          m.push_back(c < 3 ? 0.0 : 1.0);
        }
      }
    }
    views.push_back({{"image_pfm", stem + ".pfm"},
                     {"image_png", stem + ".png"},
                     {"fx", k.fx},
                     {"fy", k.fy},
                     {"cx", k.cx},
                     {"cy", k.cy},
                     {"width", k.width},
                     {"height", k.height},
                     {"cam_to_world", m}});
  }
  manifest["views"] = views;
  spit(dir / "dataset.json", manifest.dump(2) + "\n");
}

MultiViewDataset read_dataset(const fs::path& dir) {
  const fs::path manifest_path = dir / "dataset.json";
  json manifest;
  try {
    manifest = json::parse(slurp(manifest_path));
  } catch (const json::exception& e) {
    fail(ErrorCode::kInvalidArgument, "malformed " + manifest_path.string() + ": " + e.what());
  }
  MultiViewDataset ds;
  try {
    ds.meta.scene_id = manifest.at("scene_id").get<std::string>();
    ds.meta.seed = manifest.at("seed").get<std::uint64_t>();
    ds.meta.haze_kind = manifest.value("haze_kind", std::string("none"));
    if (manifest.contains("bbox")) {
      ds.meta.bbox.min = json_vec(manifest["bbox"].at("min"));
      ds.meta.bbox.max = json_vec(manifest["bbox"].at("max"));
    }
    if (manifest.contains("background")) ds.meta.background = json_vec(manifest["background"]);
    ds.meta.reference_step = manifest.value("reference_step", ds.meta.reference_step);
    ds.meta.samples_per_ray = manifest.value("samples_per_ray", ds.meta.samples_per_ray);
    const auto& views = manifest.at("views");
    for (std::size_t i = 0; i < views.size(); ++i) {
      const json& v = views[i];
      Intrinsics k{v.at("fx").get<double>(), v.at("fy").get<double>(), v.at("cx").get<double>(),
                   v.at("cy").get<double>(), v.at("width").get<int>(),  v.at("height").get<int>()};
      const json& m = v.at("cam_to_world");
      require(m.size() == 16, ErrorCode::kInvalidArgument,
              "view " + std::to_string(i) + ": cam_to_world needs 16 values");
      Pose pose;
      for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) pose.rotation(r, c) = m[4 * r + c].get<double>();
        pose.translation[r] = m[4 * r + 3].get<double>();
      }
      const fs::path image_path = dir / v.at("image_pfm").get<std::string>();
      if (!fs::exists(image_path)) {
        fail(ErrorCode::kMissingFile, "view " + std::to_string(i) + ": missing image " + image_path.string());
      }
      ds.views.push_back({CameraModel(k, pose), read_pfm(image_path)});
    }
    if (manifest.contains("ground_truth_grid") && manifest["ground_truth_grid"].is_string()) {
      ds.ground_truth = read_grid(dir / manifest["ground_truth_grid"].get<std::string>());
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::kInvalidArgument, "malformed " + manifest_path.string() + ": " + e.what());
  }
  ds.validate();
  return ds;
}

}  // namespace vxhaze
