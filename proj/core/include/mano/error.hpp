#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mano {

enum class Errc {
  invalid_input,
  divergence_undefined,
  missing_data,
  degenerate_fit,
  diverged,
  // I/O and parsing
  io,
  bad_magic,
  unsupported_version,
  unsupported_dtype,
  malformed_header,
  truncated,
  parse,
  schema,
};

std::string_view to_string(Errc code) noexcept;

/// True for codes that stem from reading or decoding external input rather
/// than from the numerical content of valid input.
bool is_io_error(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace mano
