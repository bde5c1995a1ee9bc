#pragma once

#include <stdexcept>
#include <string>

namespace dale {

enum class ErrorKind {
  parameter,   // invalid argument or precondition
  shape,       // input dimension mismatch
  empty_input,
  allocation,  // sample outside the bin grid
  parse,
  schema,
  numeric,     // non-finite values, undefined metrics
  divergence,  // training produced a NaN loss
  checksum,
  io,
  usage,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Process exit codes used by the command line tool.
enum class ExitCode : int {
  ok = 0,
  failure = 1,
  usage = 2,
  parse = 3,
  schema = 4,
  numeric = 5,
  io = 6,
};

ExitCode exit_code_for(ErrorKind kind);

}  // namespace dale
