#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include "costreach/errors.hpp"
#include "costreach/field_io.hpp"

using namespace costreach;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const char* name) {
  const fs::path dir = fs::temp_directory_path() / "costreach_io_tests";
  fs::create_directories(dir);
  return dir / name;
}

ValueField sample_field() {
  const GridSpec grid({{-1.0, 1.0, 5, false}, {0.0, 6.283185307179586, 4, true}});
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  std::vector<double> values(grid.node_count());
  for (double& v : values) v = dist(rng);
  FieldMeta meta;
  meta.step_index = 7;
  meta.dt = 0.02;
  meta.horizon = 2.1;
  meta.problem_digest = "deadbeefcafef00d";
  return ValueField(grid, std::move(values), meta);
}

}  // namespace

TEST_CASE("field round-trip is bit-exact") {
  const ValueField field = sample_field();
  const fs::path path = temp_file("roundtrip.rchf");
  save_field(field, path);
  const ValueField loaded = load_field(path);

  CHECK(loaded.grid() == field.grid());
  CHECK(loaded.meta() == field.meta());
  REQUIRE(loaded.values().size() == field.values().size());
  CHECK(std::memcmp(loaded.values().data(), field.values().data(),
                    field.values().size() * sizeof(double)) == 0);
}

TEST_CASE("sidecar metadata mirrors the header") {
  const ValueField field = sample_field();
  const fs::path path = temp_file("sidecar.rchf");
  save_field(field, path);
  fs::path sidecar = path;
  sidecar += ".meta.json";
  REQUIRE(fs::exists(sidecar));
  std::ifstream in(sidecar);
  const std::string text(std::istreambuf_iterator<char>(in), {});
  CHECK(text.find("\"dt\": 0.02") != std::string::npos);
  CHECK(text.find("deadbeefcafef00d") != std::string::npos);
  CHECK(text.find("\"field\"") != std::string::npos);
}

TEST_CASE("wrong magic is a format error") {
  const fs::path path = temp_file("garbage.rchf");
  std::ofstream out(path, std::ios::binary);
  out << "NOTAFIELDFILE_____";
  out.close();
  CHECK_THROWS_AS((void)load_field(path), FormatError);
}

TEST_CASE("truncated payload is a format error") {
  const ValueField field = sample_field();
  const fs::path path = temp_file("truncated.rchf");
  save_field(field, path);
  fs::resize_file(path, fs::file_size(path) - 16);
  CHECK_THROWS_AS((void)load_field(path), FormatError);
}

TEST_CASE("mask files carry the MASK flag") {
  const ValueField field = sample_field();
  MaskField mask{field.grid(), std::vector<std::uint8_t>(field.grid().node_count()), field.meta()};
  for (std::size_t i = 0; i < mask.values.size(); ++i) mask.values[i] = i % 3 == 0;

  const fs::path path = temp_file("mask.rchf");
  save_mask(mask, path);

  const FieldFileHeader header = read_field_header(path);
  CHECK(header.is_mask());
  CHECK(header.meta == field.meta());

  const MaskField loaded = load_mask(path);
  CHECK(loaded.values == mask.values);

  // loading a mask as a value field must refuse
  CHECK_THROWS_AS((void)load_field(path), FormatError);
  const fs::path field_path = temp_file("plain.rchf");
  save_field(field, field_path);
  CHECK_THROWS_AS((void)load_mask(field_path), FormatError);
}
