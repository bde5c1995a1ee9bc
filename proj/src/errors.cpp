#include "dale/errors.hpp"

namespace dale {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parameter: return "parameter error";
    case ErrorKind::shape: return "input-shape error";
    case ErrorKind::empty_input: return "empty-input error";
    case ErrorKind::allocation: return "allocation error";
    case ErrorKind::parse: return "parse error";
    case ErrorKind::schema: return "schema error";
    case ErrorKind::numeric: return "numeric error";
    case ErrorKind::divergence: return "divergence error";
    case ErrorKind::checksum: return "checksum error";
    case ErrorKind::io: return "i/o error";
    case ErrorKind::usage: return "usage error";
  }
  return "error";
}

ExitCode exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::usage:
    case ErrorKind::parameter:
      return ExitCode::usage;
    case ErrorKind::parse:
    case ErrorKind::checksum:
      return ExitCode::parse;
    case ErrorKind::schema:
    case ErrorKind::shape:
      return ExitCode::schema;
    case ErrorKind::numeric:
    case ErrorKind::divergence:
    case ErrorKind::allocation:
    case ErrorKind::empty_input:
      return ExitCode::numeric;
    case ErrorKind::io:
      return ExitCode::io;
  }
  return ExitCode::failure;
}

}  // namespace dale
