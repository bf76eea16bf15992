#include "gcs/demapper.hpp"
#include "gcs/error.hpp"
#include "gcs/text_io.hpp"

#include <sstream>

namespace gcs {
namespace {

constexpr const char* kMagic = "gcs-demapper";
constexpr int kVersion = 1;

void write_rows(std::ostringstream& out, const std::vector<double>& v, std::size_t cols) {
  for (std::size_t r = 0; r < v.size() / cols; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (c) out << ' ';
      out << text::format_double(v[r * cols + c]);
    }
    out << '\n';
  }
}

void read_rows(std::istringstream& in, std::vector<double>& v, std::size_t cols,
               const char* what) {
  std::string line;
  for (std::size_t r = 0; r < v.size() / cols; ++r) {
    if (!std::getline(in, line)) throw InputError(std::string("model file truncated in ") + what);
    const auto fields = text::split_ws(line);
    if (fields.size() != cols) {
      throw InputError(std::string("model row in ") + what + " has " +
                       std::to_string(fields.size()) + " values, expected " +
                       std::to_string(cols));
    }
    for (std::size_t c = 0; c < cols; ++c) v[r * cols + c] = text::parse_double(fields[c]);
  }
}

}  // namespace

std::string to_text(const NnDemapperModel& model) {
  std::ostringstream out;
  out << kMagic << ' ' << kVersion << '\n';
  out << to_string(model.layout()) << ' ' << model.bits_per_symbol() << ' ' << model.width()
      << ' ' << to_string(model.activation()) << '\n';
  for (const Mlp& net : model.nets()) {
    write_rows(out, net.w1, net.in);
    write_rows(out, net.b1, net.hidden);
    write_rows(out, net.w2, net.hidden);
    write_rows(out, net.b2, net.out);
  }
  return out.str();
}

NnDemapperModel model_from_text(const std::string& contents) {
  std::istringstream in(contents);
  std::string line;
  if (!std::getline(in, line)) throw InputError("empty model file");
  const auto magic = text::split_ws(line);
  if (magic.size() != 2 || magic[0] != kMagic) throw InputError("not a demapper model file");
  if (text::parse_int(magic[1]) != kVersion) {
    throw InputError("unsupported model file version " + magic[1]);
  }
  if (!std::getline(in, line)) throw InputError("model file missing header line");
  const auto header = text::split_ws(line);
  if (header.size() != 4) throw InputError("model header must be 'layout m n activation'");
  NnDemapperModel model(parse_layout(header[0]), static_cast<int>(text::parse_int(header[1])),
                        static_cast<int>(text::parse_int(header[2])), parse_activation(header[3]));
  for (Mlp& net : model.nets()) {
    read_rows(in, net.w1, net.in, "W1");
    read_rows(in, net.b1, net.hidden, "b1");
    read_rows(in, net.w2, net.hidden, "W2");
    read_rows(in, net.b2, net.out, "b2");
  }
  return model;
}

void write_model(const std::string& path, const NnDemapperModel& model) {
  text::write_file(path, to_text(model));
}

NnDemapperModel read_model(const std::string& path) { return model_from_text(text::read_file(path)); }

}  // namespace gcs
