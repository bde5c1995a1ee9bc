#pragma once

#include <istream>
#include <string>
#include <vector>

#include "dale/dataset.hpp"

namespace dale {

// Comma-separated numeric table with a header row. Errors carry the line
// (1-based, header is line 1) and column of the offending cell:
// missing header -> parse, header only -> empty_input, ragged row or
// non-numeric cell -> parse.
Dataset parse_csv(std::istream& in, const std::string& source = "<stream>");
Dataset ingest_csv(const std::string& path);

// Only the named columns are parsed (in the requested order); other columns
// may hold anything. A missing column raises a schema error that lists the
// expected names.
Dataset parse_csv_columns(std::istream& in, const std::vector<std::string>& columns,
                          const std::string& source = "<stream>");
Dataset ingest_csv_columns(const std::string& path, const std::vector<std::string>& columns);

}  // namespace dale
