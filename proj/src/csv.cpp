#include "dale/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>

#include "dale/errors.hpp"

namespace dale {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  std::string out = s.substr(b, e - b + 1);
  if (out.size() >= 2 && out.front() == '"' && out.back() == '"') out = out.substr(1, out.size() - 2);
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string where(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line);
}

double parse_cell(const std::string& cell, const std::string& source, std::size_t line,
                  std::size_t column, const std::string& name) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (cell.empty() || ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw Error(ErrorKind::parse, where(source, line) + ": column " + std::to_string(column + 1) +
                                      " ('" + name + "'): cannot parse '" + cell + "' as a number");
  }
  return v;
}

Dataset parse_impl(std::istream& in, const std::optional<std::vector<std::string>>& wanted,
                   const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    header = split(line);
    break;
  }
  if (header.empty()) throw Error(ErrorKind::parse, where(source, line_no ? line_no : 1) + ": missing header row");

  std::vector<std::size_t> pick;
  std::vector<std::string> names;
  if (wanted) {
    std::string missing;
    for (const auto& w : *wanted) {
      std::size_t found = header.size();
      for (std::size_t c = 0; c < header.size(); ++c)
        if (header[c] == w) found = c;
      if (found == header.size()) {
        missing += (missing.empty() ? "" : ", ") + w;
      } else {
        pick.push_back(found);
        names.push_back(w);
      }
    }
    if (!missing.empty()) {
      std::string expected;
      for (const auto& w : *wanted) expected += (expected.empty() ? "" : ", ") + w;
      throw Error(ErrorKind::schema, source + ": missing column(s) " + missing + "; expected " + expected);
    }
  } else {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (header[c].empty()) {
        throw Error(ErrorKind::parse, where(source, line_no) + ": column " + std::to_string(c + 1) +
                                          " has an empty name");
      }
      pick.push_back(c);
    }
    names = header;
  }

  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) {
      throw Error(ErrorKind::parse, where(source, line_no) + ": expected " + std::to_string(header.size()) +
                                        " fields, found " + std::to_string(cells.size()));
    }
    for (auto c : pick) values.push_back(parse_cell(cells[c], source, line_no, c, header[c]));
    ++rows;
  }
  if (rows == 0) throw Error(ErrorKind::empty_input, source + ": no data rows after the header");
  Matrix m(rows, pick.size());
  std::copy(values.begin(), values.end(), m.data().begin());
  return Dataset(std::move(m), std::move(names));
}

std::ifstream open(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open '" + path + "'");
  return in;
}

}  // namespace

Dataset parse_csv(std::istream& in, const std::string& source) {
  return parse_impl(in, std::nullopt, source);
}

Dataset ingest_csv(const std::string& path) {
  auto in = open(path);
  return parse_csv(in, path);
}

Dataset parse_csv_columns(std::istream& in, const std::vector<std::string>& columns,
                          const std::string& source) {
  if (columns.empty()) throw Error(ErrorKind::parameter, "no columns requested");
  return parse_impl(in, columns, source);
}

Dataset ingest_csv_columns(const std::string& path, const std::vector<std::string>& columns) {
  auto in = open(path);
  return parse_csv_columns(in, columns, path);
}

}  // namespace dale
