#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mano/matrix.hpp"

namespace mano::io {

enum class Dtype { f32, f64, i64 };

std::size_t dtype_size(Dtype dtype) noexcept;

/// In-memory NPY array: dtype, 1-D or 2-D shape and a little-endian,
/// row-major byte buffer.
struct ArrayFile {
  Dtype dtype = Dtype::f64;
  std::vector<std::size_t> shape;
  std::vector<std::uint8_t> bytes;

  std::size_t element_count() const noexcept;
  void validate() const;

  static ArrayFile from_matrix(const Matrix& m);
  static ArrayFile from_f32(std::span<const float> values, std::vector<std::size_t> shape);
  static ArrayFile from_f64(std::span<const double> values, std::vector<std::size_t> shape);
  static ArrayFile from_i64(std::span<const std::int64_t> values, std::vector<std::size_t> shape);

  /// Values widened to double, row-major. A 1-D array becomes a single row.
  Matrix to_matrix() const;
  /// Requires dtype i64.
  std::vector<std::int64_t> to_i64() const;

  bool operator==(const ArrayFile&) const = default;
};

/// Decodes an NPY v1.0 image. Errors: Errc::bad_magic,
/// Errc::unsupported_version, Errc::unsupported_dtype,
/// Errc::malformed_header, Errc::truncated.
ArrayFile parse_npy(std::span<const std::uint8_t> image);

/// Encodes v1.0, C order. The header dict is space-padded and
/// newline-terminated so that 10 + header_len is a multiple of 64.
std::vector<std::uint8_t> encode_npy(const ArrayFile& array);

ArrayFile read_npy(const std::filesystem::path& path);
void write_npy(const std::filesystem::path& path, const ArrayFile& array);

/// Rectangular numeric CSV; a first row containing any non-numeric cell is
/// treated as a header and skipped.
Matrix read_csv_matrix(const std::filesystem::path& path);

LogitsMatrix read_logits_csv(const std::filesystem::path& path);

/// Logits from .npy (f32/f64/i64, 2-D) or .csv.
LogitsMatrix read_logits(const std::filesystem::path& path);

/// Labels from i64 .npy, or a text/CSV file with one integer per line
/// (optional header). Values must lie in [0, num_classes).
std::vector<std::int64_t> read_labels(const std::filesystem::path& path, std::size_t num_classes);

enum class Role { validation, test };

struct ManifestEntry {
  std::string id;
  std::filesystem::path logits_path;
  std::optional<std::filesystem::path> labels_path;
  Role role = Role::test;
};

struct DatasetManifest {
  int schema_version = 1;
  std::vector<ManifestEntry> entries;

  const ManifestEntry* validation() const;
};

/// Parses and validates a schema_version 1 manifest. Relative paths are
/// resolved against `base_dir`. Errors carry a JSON pointer to the offending
/// field.
DatasetManifest parse_manifest(const std::string& json_text, const std::filesystem::path& base_dir);
DatasetManifest read_manifest(const std::filesystem::path& path);

/// Writes paths relative to the manifest's directory when possible.
void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);

}  // namespace mano::io
