#include "dale/model_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dale/errors.hpp"

namespace dale {
namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  std::istringstream next() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      return std::istringstream(line);
    }
    fail("unexpected end of model file");
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorKind::parse, "model file line " + std::to_string(line_no_) + ": " + msg);
  }

  void expect_keyword(std::istringstream& ss, const std::string& keyword) const {
    std::string word;
    ss >> word;
    if (word != keyword) fail("expected '" + keyword + "', found '" + word + "'");
  }

  template <typename T>
  T read(std::istringstream& ss, const char* what) const {
    std::string tok;
    if (!(ss >> tok)) fail(std::string("missing ") + what);
    T v{};
    const auto* first = tok.data();
    const auto* last = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) fail(std::string("bad ") + what + " '" + tok + "'");
    return v;
  }

  void expect_end(std::istringstream& ss) const {
    std::string extra;
    if (ss >> extra) fail("unexpected token '" + extra + "'");
  }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

}  // namespace

void write_mlp(std::ostream& out, const MlpModel& model) {
  const auto& widths = model.layer_widths();
  out << "dale-mlp 1\n";
  out << "activation " << to_string(model.activation()) << "\n";
  out << "widths";
  for (auto w : widths) out << ' ' << w;
  out << "\n";
  for (std::size_t l = 0; l < model.num_layers(); ++l) {
    const auto& w = model.weight(l);
    out << "weights " << l << "\n";
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) out << (c ? " " : "") << format_double(w(r, c));
      out << "\n";
    }
    const auto& b = model.bias(l);
    out << "bias " << l << "\n";
    for (Eigen::Index r = 0; r < b.size(); ++r) out << (r ? " " : "") << format_double(b(r));
    out << "\n";
  }
  out << "end\n";
}

MlpModel read_mlp(std::istream& in) {
  LineReader reader(in);
  auto line = reader.next();
  reader.expect_keyword(line, "dale-mlp");
  if (reader.read<int>(line, "version") != 1) reader.fail("unsupported model file version");
  reader.expect_end(line);

  line = reader.next();
  reader.expect_keyword(line, "activation");
  std::string act_name;
  line >> act_name;
  Activation act{};
  try {
    act = parse_activation(act_name);
  } catch (const Error& e) {
    reader.fail(e.what());
  }
  reader.expect_end(line);

  line = reader.next();
  reader.expect_keyword(line, "widths");
  std::vector<std::size_t> widths;
  while (true) {
    std::string tok;
    if (!(line >> tok)) break;
    std::size_t w = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), w);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || w == 0) reader.fail("bad width '" + tok + "'");
    widths.push_back(w);
  }
  if (widths.size() < 2) reader.fail("need at least two widths");

  std::vector<std::vector<double>> weights, biases;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    line = reader.next();
    reader.expect_keyword(line, "weights");
    if (reader.read<std::size_t>(line, "layer index") != l) reader.fail("layers out of order");
    std::vector<double> w;
    w.reserve(widths[l] * widths[l + 1]);
    for (std::size_t r = 0; r < widths[l + 1]; ++r) {
      line = reader.next();
      for (std::size_t c = 0; c < widths[l]; ++c) w.push_back(reader.read<double>(line, "weight"));
      reader.expect_end(line);
    }
    line = reader.next();
    reader.expect_keyword(line, "bias");
    if (reader.read<std::size_t>(line, "layer index") != l) reader.fail("layers out of order");
    line = reader.next();
    std::vector<double> b;
    for (std::size_t r = 0; r < widths[l + 1]; ++r) b.push_back(reader.read<double>(line, "bias"));
    reader.expect_end(line);
    weights.push_back(std::move(w));
    biases.push_back(std::move(b));
  }
  line = reader.next();
  reader.expect_keyword(line, "end");
  try {
    return MlpModel(std::move(widths), act, std::move(weights), std::move(biases));
  } catch (const Error& e) {
    throw Error(ErrorKind::parse, std::string("invalid model: ") + e.what());
  }
}

void save_mlp(const std::string& path, const MlpModel& model) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io, "cannot write model file '" + path + "'");
  write_mlp(out, model);
  if (!out) throw Error(ErrorKind::io, "failed writing model file '" + path + "'");
}

MlpModel load_mlp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open model file '" + path + "'");
  return read_mlp(in);
}

}  // namespace dale
