#include "mano/error.hpp"

namespace mano {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_input: return "invalid-input";
    case Errc::divergence_undefined: return "divergence-undefined";
    case Errc::missing_data: return "missing-data";
    case Errc::degenerate_fit: return "degenerate-fit";
    case Errc::diverged: return "diverged";
    case Errc::io: return "io";
    case Errc::bad_magic: return "bad-magic";
    case Errc::unsupported_version: return "unsupported-version";
    case Errc::unsupported_dtype: return "unsupported-dtype";
    case Errc::malformed_header: return "malformed-header";
    case Errc::truncated: return "truncated";
    case Errc::parse: return "parse";
    case Errc::schema: return "schema";
  }
  return "unknown";
}

bool is_io_error(Errc code) noexcept {
  switch (code) {
    case Errc::io:
    case Errc::bad_magic:
    case Errc::unsupported_version:
    case Errc::unsupported_dtype:
    case Errc::malformed_header:
    case Errc::truncated:
    case Errc::parse:
    case Errc::schema:
      return true;
    default:
      return false;
  }
}

}  // namespace mano
