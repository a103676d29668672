#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>
#include <string_view>

#include "mano/error.hpp"
#include "mano/io.hpp"

namespace mano::io {

static_assert(std::endian::native == std::endian::little, "NPY buffers are handled as little-endian");

namespace {

constexpr std::array<std::uint8_t, 6> kMagic{0x93, 0x4E, 0x55, 0x4D, 0x50, 0x59};  // \x93NUMPY
constexpr std::size_t kPreambleSize = 10;  // magic + version + u16 header length

std::string_view descr_of(Dtype dtype) {
  switch (dtype) {
    case Dtype::f32: return "<f4";
    case Dtype::f64: return "<f8";
    case Dtype::i64: return "<i8";
  }
  return "";
}

[[noreturn]] void header_error(const std::string& msg) {
  throw Error(Errc::malformed_header, "npy header: " + msg);
}

// Minimal reader for the Python literal dict numpy writes.
class HeaderParser {
 public:
  explicit HeaderParser(std::string_view text) : text_(text) {}

  struct Fields {
    std::optional<std::string> descr;
    std::optional<bool> fortran_order;
    std::optional<std::vector<std::size_t>> shape;
  };

  Fields parse() {
    Fields f;
    expect('{');
    while (true) {
      skip_ws();
      if (peek() == '}') {
        ++pos_;
        break;
      }
      const std::string key = string_literal();
      expect(':');
      if (key == "descr") {
        if (f.descr) header_error("duplicate key 'descr'");
        f.descr = string_literal();
      } else if (key == "fortran_order") {
        if (f.fortran_order) header_error("duplicate key 'fortran_order'");
        f.fortran_order = bool_literal();
      } else if (key == "shape") {
        if (f.shape) header_error("duplicate key 'shape'");
        f.shape = tuple_literal();
      } else {
        header_error("unexpected key '" + key + "'");
      }
      skip_ws();
      if (peek() == ',') {
        ++pos_;
      } else if (peek() != '}') {
        header_error("expected ',' or '}'");
      }
    }
    skip_ws();
    if (pos_ != text_.size()) header_error("trailing characters after dict");
    return f;
  }

 private:
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\n' || text_[pos_] == '\t')) ++pos_;
  }

  void expect(char c) {
    skip_ws();
    if (peek() != c) header_error(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string string_literal() {
    skip_ws();
    const char quote = peek();
    if (quote != '\'' && quote != '"') header_error("expected a string literal");
    const std::size_t end = text_.find(quote, pos_ + 1);
    if (end == std::string_view::npos) header_error("unterminated string literal");
    std::string out(text_.substr(pos_ + 1, end - pos_ - 1));
    pos_ = end + 1;
    return out;
  }

  bool bool_literal() {
    skip_ws();
    if (text_.substr(pos_, 4) == "True") {
      pos_ += 4;
      return true;
    }
    if (text_.substr(pos_, 5) == "False") {
      pos_ += 5;
      return false;
    }
    header_error("expected True or False");
  }

  std::vector<std::size_t> tuple_literal() {
    expect('(');
    std::vector<std::size_t> dims;
    while (true) {
      skip_ws();
      if (peek() == ')') {
        ++pos_;
        return dims;
      }
      if (!std::isdigit(static_cast<unsigned char>(peek()))) header_error("shape entries must be nonnegative integers");
      std::size_t v = 0;
      while (std::isdigit(static_cast<unsigned char>(peek()))) {
        const std::size_t digit = static_cast<std::size_t>(peek() - '0');
        if (v > (std::numeric_limits<std::size_t>::max() - digit) / 10) header_error("shape entry overflows");
        v = v * 10 + digit;
        ++pos_;
      }
      dims.push_back(v);
      skip_ws();
      if (peek() == ',') {
        ++pos_;
      } else if (peek() != ')') {
        header_error("expected ',' or ')' in shape");
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string shape_literal(const std::vector<std::size_t>& shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(shape[i]);
  }
  if (shape.size() == 1) s += ",";
  s += ")";
  return s;
}

template <class T>
ArrayFile from_typed(std::span<const T> values, std::vector<std::size_t> shape, Dtype dtype) {
  ArrayFile a;
  a.dtype = dtype;
  a.shape = std::move(shape);
  a.bytes.resize(values.size_bytes());
  if (!values.empty()) std::memcpy(a.bytes.data(), values.data(), values.size_bytes());
  a.validate();
  return a;
}

template <class T>
T load(const std::uint8_t* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

}  // namespace

std::size_t dtype_size(Dtype dtype) noexcept {
  return dtype == Dtype::f32 ? 4 : 8;
}

std::size_t ArrayFile::element_count() const noexcept {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

void ArrayFile::validate() const {
  if (shape.empty() || shape.size() > 2) {
    throw Error(Errc::invalid_input, "arrays must be 1-D or 2-D, got rank " + std::to_string(shape.size()));
  }
  if (bytes.size() != element_count() * dtype_size(dtype)) {
    throw Error(Errc::invalid_input, "array buffer size does not match shape and dtype");
  }
}

ArrayFile ArrayFile::from_matrix(const Matrix& m) {
  return from_f64(m.values(), {m.rows(), m.cols()});
}

ArrayFile ArrayFile::from_f32(std::span<const float> values, std::vector<std::size_t> shape) {
  return from_typed(values, std::move(shape), Dtype::f32);
}

ArrayFile ArrayFile::from_f64(std::span<const double> values, std::vector<std::size_t> shape) {
  return from_typed(values, std::move(shape), Dtype::f64);
}

ArrayFile ArrayFile::from_i64(std::span<const std::int64_t> values, std::vector<std::size_t> shape) {
  return from_typed(values, std::move(shape), Dtype::i64);
}

Matrix ArrayFile::to_matrix() const {
  validate();
  const std::size_t rows = shape.size() == 1 ? 1 : shape[0];
  const std::size_t cols = shape.back();
  std::vector<double> values(element_count());
  const std::size_t width = dtype_size(dtype);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::uint8_t* p = bytes.data() + i * width;
    switch (dtype) {
      case Dtype::f32: values[i] = load<float>(p); break;
      case Dtype::f64: values[i] = load<double>(p); break;
      case Dtype::i64: values[i] = static_cast<double>(load<std::int64_t>(p)); break;
    }
  }
  return Matrix(rows, cols, std::move(values));
}

std::vector<std::int64_t> ArrayFile::to_i64() const {
  validate();
  if (dtype != Dtype::i64) throw Error(Errc::unsupported_dtype, "expected an int64 array");
  std::vector<std::int64_t> out(element_count());
  if (!out.empty()) std::memcpy(out.data(), bytes.data(), bytes.size());
  return out;
}

ArrayFile parse_npy(std::span<const std::uint8_t> image) {
  const std::size_t probe = std::min(image.size(), kMagic.size());
  if (!std::equal(image.begin(), image.begin() + static_cast<std::ptrdiff_t>(probe), kMagic.begin())) {
    throw Error(Errc::bad_magic, "not an NPY file (bad magic string)");
  }
  if (image.size() < kPreambleSize) throw Error(Errc::truncated, "NPY preamble truncated");

  const unsigned major = image[6];
  const unsigned minor = image[7];
  if (major != 1 || minor != 0) {
    throw Error(Errc::unsupported_version, "NPY version " + std::to_string(major) + "." + std::to_string(minor) +
                                               " not supported; only 1.0 is accepted");
  }
  const std::size_t header_len = static_cast<std::size_t>(image[8]) | (static_cast<std::size_t>(image[9]) << 8);
  if (image.size() < kPreambleSize + header_len) throw Error(Errc::truncated, "NPY header truncated");

  const auto* header_begin = reinterpret_cast<const char*>(image.data() + kPreambleSize);
  const std::string_view header(header_begin, header_len);
  for (char c : header) {
    if (static_cast<unsigned char>(c) > 127) header_error("non-ASCII byte");
  }

  const auto fields = HeaderParser(header).parse();
  if (!fields.descr || !fields.fortran_order || !fields.shape) {
    header_error("missing one of descr/fortran_order/shape");
  }

  ArrayFile out;
  if (*fields.descr == "<f4") {
    out.dtype = Dtype::f32;
  } else if (*fields.descr == "<f8") {
    out.dtype = Dtype::f64;
  } else if (*fields.descr == "<i8") {
    out.dtype = Dtype::i64;
  } else {
    throw Error(Errc::unsupported_dtype, "unsupported NPY dtype '" + *fields.descr + "'");
  }

  const auto& shape = *fields.shape;
  if (shape.empty() || shape.size() > 2) {
    header_error("only 1-D and 2-D arrays are supported, got rank " + std::to_string(shape.size()));
  }

  // Validate the element count against the payload before allocating.
  const std::size_t width = dtype_size(out.dtype);
  const std::size_t payload = image.size() - kPreambleSize - header_len;
  std::size_t count = 1;
  for (std::size_t d : shape) {
    if (d != 0 && count > std::numeric_limits<std::size_t>::max() / d) header_error("shape overflows");
    count *= d;
  }
  if (count > std::numeric_limits<std::size_t>::max() / width) header_error("shape overflows");
  if (count * width > payload) {
    throw Error(Errc::truncated, "NPY payload truncated: expected " + std::to_string(count * width) +
                                     " bytes, found " + std::to_string(payload));
  }
  if (count * width < payload) header_error("trailing bytes after payload");

  out.shape = shape;
  const auto data = image.subspan(kPreambleSize + header_len);
  if (*fields.fortran_order && shape.size() == 2) {
    const std::size_t rows = shape[0];
    const std::size_t cols = shape[1];
    out.bytes.resize(count * width);
    for (std::size_t j = 0; j < cols; ++j)
      for (std::size_t i = 0; i < rows; ++i)
        std::memcpy(out.bytes.data() + (i * cols + j) * width, data.data() + (j * rows + i) * width, width);
  } else {
    out.bytes.assign(data.begin(), data.end());
  }
  return out;
}

std::vector<std::uint8_t> encode_npy(const ArrayFile& array) {
  array.validate();
  std::string header = "{'descr': '" + std::string(descr_of(array.dtype)) +
                       "', 'fortran_order': False, 'shape': " + shape_literal(array.shape) + ", }";
  const std::size_t unpadded = kPreambleSize + header.size() + 1;
  const std::size_t padded = (unpadded + 63) / 64 * 64;
  header.append(padded - unpadded, ' ');
  header.push_back('\n');
  if (header.size() > std::numeric_limits<std::uint16_t>::max()) {
    throw Error(Errc::invalid_input, "NPY header too long for version 1.0");
  }

  std::vector<std::uint8_t> out(kPreambleSize + header.size() + array.bytes.size());
  auto it = std::copy(kMagic.begin(), kMagic.end(), out.begin());
  *it++ = 1;
  *it++ = 0;
  *it++ = static_cast<std::uint8_t>(header.size() & 0xff);
  *it++ = static_cast<std::uint8_t>(header.size() >> 8);
  it = std::copy(header.begin(), header.end(), it);
  std::copy(array.bytes.begin(), array.bytes.end(), it);
  return out;
}

ArrayFile read_npy(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open '" + path.string() + "'");
  const std::vector<std::uint8_t> image((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return parse_npy(image);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void write_npy(const std::filesystem::path& path, const ArrayFile& array) {
  const auto image = encode_npy(array);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io, "cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(image.data()), static_cast<std::streamsize>(image.size()));
  if (!out) throw Error(Errc::io, "write to '" + path.string() + "' failed");
}

}  // namespace mano::io
