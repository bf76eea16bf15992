#include "gcs/error.hpp"
#include "gcs/training.hpp"

#include <filesystem>
#include <sstream>

namespace gcs {

void save_checkpoint(const std::string& dir, const TrainedSystem& sys) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw FileError("cannot create checkpoint directory '" + dir + "': " + ec.message());
  write_constellation(dir + "/constellation.tsv", sys.constellation);
  write_model(dir + "/demapper.txt", sys.demapper);
  std::ostringstream meta;
  meta << to_config_text(sys.meta.config)
       << "steps_run = " << sys.meta.steps_run << '\n'
       << "initial_loss = " << text::format_double(sys.meta.initial_loss) << '\n'
       << "final_loss = " << text::format_double(sys.meta.final_loss) << '\n'
       << "final_temperature = " << text::format_double(sys.meta.final_temperature) << '\n';
  text::write_file(dir + "/meta.txt", meta.str());
}

TrainedSystem load_checkpoint(const std::string& dir) {
  if (!std::filesystem::is_directory(dir)) throw FileError("checkpoint '" + dir + "' not found");
  TrainedSystem sys;
  sys.constellation = read_constellation(dir + "/constellation.tsv");
  sys.demapper = read_model(dir + "/demapper.txt");
  const text::KeyValues kv = text::parse_key_values(text::read_file(dir + "/meta.txt"));
  sys.meta.config = train_config_from(kv);
  auto number = [&](const char* key, double fallback) {
    const auto it = kv.find(key);
    return it == kv.end() ? fallback : text::parse_double(it->second);
  };
  sys.meta.steps_run = static_cast<int>(number("steps_run", 0.0));
  sys.meta.initial_loss = number("initial_loss", 0.0);
  sys.meta.final_loss = number("final_loss", 0.0);
  sys.meta.final_temperature = number("final_temperature", 1.0);
  if (sys.demapper.bits_per_symbol() != sys.constellation.bits_per_symbol()) {
    throw InputError("checkpoint '" + dir + "' mixes constellation and demapper of different m");
  }
  return sys;
}

}  // namespace gcs
