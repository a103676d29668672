#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "mano/error.hpp"
#include "mano/io.hpp"

namespace mano::io {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

template <class T>
bool parse_number(std::string_view cell, T& out) {
  if (cell.empty()) return false;
  if (cell.front() == '+') cell.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return ec == std::errc() && ptr == cell.data() + cell.size();
}

struct Line {
  std::size_t number;  // 1-based
  std::string text;
};

std::vector<Line> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open '" + path.string() + "'");
  std::vector<Line> lines;
  std::string text;
  std::size_t number = 0;
  while (std::getline(in, text)) {
    ++number;
    if (trim(text).empty()) continue;
    lines.push_back({number, std::move(text)});
  }
  return lines;
}

std::string where(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line);
}

}  // namespace

Matrix read_csv_matrix(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw Error(Errc::parse, path.string() + ": empty CSV file");

  std::size_t first = 0;
  {
    const auto cells = split_cells(lines.front().text);
    double probe = 0.0;
    const bool numeric = std::all_of(cells.begin(), cells.end(), [&](std::string_view c) { return parse_number(c, probe); });
    if (!numeric) first = 1;
  }
  if (first >= lines.size()) throw Error(Errc::parse, path.string() + ": CSV has a header but no data rows");

  const std::size_t cols = split_cells(lines[first].text).size();
  std::vector<double> values;
  values.reserve((lines.size() - first) * cols);
  for (std::size_t r = first; r < lines.size(); ++r) {
    const auto cells = split_cells(lines[r].text);
    if (cells.size() != cols) {
      throw Error(Errc::parse, where(path, lines[r].number) + ": expected " + std::to_string(cols) +
                                   " columns, found " + std::to_string(cells.size()));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double v = 0.0;
      if (!parse_number(cells[c], v)) {
        throw Error(Errc::parse, where(path, lines[r].number) + ", column " + std::to_string(c + 1) +
                                     ": non-numeric cell '" + std::string(cells[c]) + "'");
      }
      values.push_back(v);
    }
  }
  return Matrix(lines.size() - first, cols, std::move(values));
}

LogitsMatrix read_logits_csv(const std::filesystem::path& path) {
  return LogitsMatrix(read_csv_matrix(path));
}

LogitsMatrix read_logits(const std::filesystem::path& path) {
  if (path.extension() == ".csv") return read_logits_csv(path);
  const ArrayFile array = read_npy(path);
  if (array.shape.size() != 2) {
    throw Error(Errc::parse, path.string() + ": logits must be a 2-D array, got rank " +
                                 std::to_string(array.shape.size()));
  }
  try {
    return LogitsMatrix(array.to_matrix());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::vector<std::int64_t> read_labels(const std::filesystem::path& path, std::size_t num_classes) {
  std::vector<std::int64_t> labels;
  if (path.extension() == ".npy") {
    const ArrayFile array = read_npy(path);
    if (array.dtype != Dtype::i64) throw Error(Errc::unsupported_dtype, path.string() + ": labels must be int64");
    if (array.shape.size() == 2 && array.shape[1] != 1) {
      throw Error(Errc::parse, path.string() + ": labels must be 1-D or a single column");
    }
    labels = array.to_i64();
  } else {
    const auto lines = read_lines(path);
    for (std::size_t r = 0; r < lines.size(); ++r) {
      const auto cells = split_cells(lines[r].text);
      if (cells.size() != 1) {
        throw Error(Errc::parse, where(path, lines[r].number) + ": expected a single label column");
      }
      std::int64_t v = 0;
      if (!parse_number(cells[0], v)) {
        if (r == 0) continue;  // header
        throw Error(Errc::parse, where(path, lines[r].number) + ": non-integer label '" + std::string(cells[0]) + "'");
      }
      labels.push_back(v);
    }
  }
  if (labels.empty()) throw Error(Errc::parse, path.string() + ": no labels found");

  const auto [lo, hi] = std::minmax_element(labels.begin(), labels.end());
  if (*lo < 0 || static_cast<std::size_t>(*hi) >= num_classes) {
    std::ostringstream msg;
    msg << path.string() << ": labels must lie in [0, " << num_classes << "), found range [" << *lo << ", " << *hi
        << "]";
    if (*lo >= 1 && static_cast<std::size_t>(*hi) == num_classes) msg << " (1-based labels are not accepted)";
    throw Error(Errc::invalid_input, msg.str());
  }
  return labels;
}

}  // namespace mano::io
