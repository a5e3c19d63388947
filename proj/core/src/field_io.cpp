#include "costreach/field_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "costreach/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "field files are little-endian; big-endian hosts are not supported");

namespace costreach {

namespace {

constexpr char kMagic[4] = {'R', 'C', 'H', 'F'};

template <typename T>
void write_raw(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_raw(std::istream& in, const char* what) {
  T value;
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw FormatError(std::string("field file truncated while reading ") + what);
  return value;
}

void write_header(std::ostream& out, const GridSpec& grid, const FieldMeta& meta,
                  std::uint8_t flags) {
  out.write(kMagic, sizeof(kMagic));
  write_raw<std::uint16_t>(out, kFieldFormatVersion);
  write_raw<std::uint16_t>(out, static_cast<std::uint16_t>(grid.dim_count()));
  for (int d = 0; d < grid.dim_count(); ++d) {
    const GridDim& dim = grid.dim(d);
    write_raw<double>(out, dim.lower);
    write_raw<double>(out, dim.upper);
    write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(dim.point_count));
    write_raw<std::uint8_t>(out, dim.periodic ? 1 : 0);
  }
  write_raw<std::uint32_t>(out, meta.step_index);
  write_raw<double>(out, meta.dt);
  write_raw<double>(out, meta.horizon);
  if (meta.problem_digest.size() > 0xffff)
    throw FormatError("problem digest longer than 65535 bytes");
  write_raw<std::uint16_t>(out, static_cast<std::uint16_t>(meta.problem_digest.size()));
  out.write(meta.problem_digest.data(), static_cast<std::streamsize>(meta.problem_digest.size()));
  write_raw<std::uint8_t>(out, flags);
}

FieldFileHeader read_header(std::istream& in, const std::filesystem::path& path) {
  char magic[4];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw FormatError("not a field file (bad magic): " + path.string());
  const auto version = read_raw<std::uint16_t>(in, "version");
  if (version != kFieldFormatVersion)
    throw FormatError("unsupported field format version " + std::to_string(version) + ": " +
                      path.string());
  const auto dim_count = read_raw<std::uint16_t>(in, "dim_count");
  if (dim_count == 0 || dim_count > kMaxDim)
    throw FormatError("field file declares unsupported dimension count " +
                      std::to_string(dim_count));
  std::vector<GridDim> dims(dim_count);
  for (auto& dim : dims) {
    dim.lower = read_raw<double>(in, "dimension lower bound");
    dim.upper = read_raw<double>(in, "dimension upper bound");
    dim.point_count = static_cast<int>(read_raw<std::uint32_t>(in, "dimension point count"));
    dim.periodic = read_raw<std::uint8_t>(in, "dimension periodic flag") != 0;
  }
  FieldMeta meta;
  meta.step_index = read_raw<std::uint32_t>(in, "step index");
  meta.dt = read_raw<double>(in, "dt");
  meta.horizon = read_raw<double>(in, "horizon");
  const auto digest_len = read_raw<std::uint16_t>(in, "digest length");
  meta.problem_digest.resize(digest_len);
  in.read(meta.problem_digest.data(), digest_len);
  if (!in) throw FormatError("field file truncated while reading digest: " + path.string());
  FieldFileHeader header{GridSpec(std::move(dims)), std::move(meta),
                         read_raw<std::uint8_t>(in, "flags")};
  return header;
}

void write_sidecar(const std::filesystem::path& path, const GridSpec& grid, const FieldMeta& meta,
                   std::uint8_t flags) {
  nlohmann::json doc;
  doc["format_version"] = kFieldFormatVersion;
  doc["kind"] = (flags & kFieldFlagMask) ? "mask" : "field";
  auto& dims = doc["grid"] = nlohmann::json::array();
  for (int d = 0; d < grid.dim_count(); ++d) {
    const GridDim& dim = grid.dim(d);
    dims.push_back({{"lower", dim.lower},
                    {"upper", dim.upper},
                    {"points", dim.point_count},
                    {"periodic", dim.periodic}});
  }
  doc["step_index"] = meta.step_index;
  doc["dt"] = meta.dt;
  doc["horizon"] = meta.horizon;
  doc["problem_digest"] = meta.problem_digest;

  std::filesystem::path sidecar = path;
  sidecar += ".meta.json";
  std::ofstream out(sidecar);
  if (!out) throw FormatError("cannot write metadata file: " + sidecar.string());
  out << doc.dump(2) << '\n';
}

}  // namespace

void save_field(const ValueField& field, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open field file for writing: " + path.string());
  write_header(out, field.grid(), field.meta(), 0);
  out.write(reinterpret_cast<const char*>(field.values().data()),
            static_cast<std::streamsize>(field.values().size() * sizeof(double)));
  if (!out) throw FormatError("write failed: " + path.string());
  out.close();
  write_sidecar(path, field.grid(), field.meta(), 0);
}

ValueField load_field(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open field file: " + path.string());
  FieldFileHeader header = read_header(in, path);
  if (header.is_mask())
    throw FormatError("expected a value field but found a mask: " + path.string());
  std::vector<double> values(header.grid.node_count());
  in.read(reinterpret_cast<char*>(values.data()),
          static_cast<std::streamsize>(values.size() * sizeof(double)));
  if (static_cast<std::size_t>(in.gcount()) != values.size() * sizeof(double))
    throw FormatError("field file truncated: header declares " +
                      std::to_string(header.grid.node_count()) + " nodes but payload is short: " +
                      path.string());
  return ValueField(std::move(header.grid), std::move(values), std::move(header.meta));
}

void save_mask(const MaskField& mask, const std::filesystem::path& path) {
  if (mask.values.size() != mask.grid.node_count())
    throw std::invalid_argument("save_mask: buffer length does not match node count");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open mask file for writing: " + path.string());
  write_header(out, mask.grid, mask.meta, kFieldFlagMask);
  out.write(reinterpret_cast<const char*>(mask.values.data()),
            static_cast<std::streamsize>(mask.values.size()));
  if (!out) throw FormatError("write failed: " + path.string());
  out.close();
  write_sidecar(path, mask.grid, mask.meta, kFieldFlagMask);
}

MaskField load_mask(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open mask file: " + path.string());
  FieldFileHeader header = read_header(in, path);
  if (!header.is_mask()) throw FormatError("expected a mask but found a value field: " + path.string());
  std::vector<std::uint8_t> values(header.grid.node_count());
  in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size()));
  if (static_cast<std::size_t>(in.gcount()) != values.size())
    throw FormatError("mask file truncated: " + path.string());
  return MaskField{std::move(header.grid), std::move(values), std::move(header.meta)};
}

FieldFileHeader read_field_header(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open field file: " + path.string());
  return read_header(in, path);
}

}  // namespace costreach
