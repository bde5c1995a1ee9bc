#pragma once

#include <iosfwd>
#include <string>

#include "dale/mlp.hpp"

namespace dale {

// Plain-text model file:
//
//   dale-mlp 1
//   activation <tanh|softplus|identity>
//   widths <w0> <w1> ... <wL>
//   weights <l>                 (one line per output unit, w[l] values each)
//   bias <l>                    (one line, w[l+1] values)
//   ...                         (weights/bias for l = 0 .. L-1, in order)
//   end
//
// Values are decimal floats printed with 17 significant digits, so a
// save/load round trip is exact.
void write_mlp(std::ostream& out, const MlpModel& model);
MlpModel read_mlp(std::istream& in);

void save_mlp(const std::string& path, const MlpModel& model);
MlpModel load_mlp(const std::string& path);

}  // namespace dale
