#pragma once

#include <filesystem>

#include "costreach/grid.hpp"

namespace costreach {

// Binary field format ("RCHF"):
//   magic "RCHF", format version u16, dim_count u16,
//   per dimension: lower f64, upper f64, point_count u32, periodic u8,
//   meta: step_index u32, dt f64, horizon f64, digest length u16 + UTF-8 bytes,
//   flags u8 (bit 0: MASK),
//   payload: little-endian f64 per node (value fields) or u8 per node (masks),
//   row-major with the first declared dimension outermost.
//
// save_field/save_mask also write a sibling human-readable "<path>.meta.json"
// mirroring the header.

inline constexpr std::uint16_t kFieldFormatVersion = 1;
inline constexpr std::uint8_t kFieldFlagMask = 0x01;

struct FieldFileHeader {
  GridSpec grid;
  FieldMeta meta;
  std::uint8_t flags = 0;

  bool is_mask() const { return (flags & kFieldFlagMask) != 0; }
};

void save_field(const ValueField& field, const std::filesystem::path& path);
ValueField load_field(const std::filesystem::path& path);

void save_mask(const MaskField& mask, const std::filesystem::path& path);
MaskField load_mask(const std::filesystem::path& path);

/// Reads only the header; cheap way to tell fields from masks.
FieldFileHeader read_field_header(const std::filesystem::path& path);

}  // namespace costreach
