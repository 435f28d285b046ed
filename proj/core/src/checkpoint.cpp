#include "steinmetz/checkpoint.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>

#include "steinmetz/binary_io.hpp"
#include "steinmetz/errors.hpp"

namespace steinmetz {

using nlohmann::json;

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  const NetworkSpec& spec = checkpoint.model.spec();
  json params = json::array();
  for (const auto& p : checkpoint.model.params()) params.push_back({{"name", p.name}, {"shape", p.value.shape()}});
  const json header = {{"format", "steinmetz-checkpoint"},
                       {"version", 1},
                       {"spec",
                        {{"kind", std::string(to_string(spec.kind))},
                         {"input_dim", spec.input_dim},
                         {"latent_dim", spec.latent_dim},
                         {"output_dim", spec.output_dim},
                         {"task", std::string(to_string(spec.task))}}},
                       {"seed", checkpoint.seed},
                       {"epoch", checkpoint.epoch},
                       {"params", params}};
  const std::string text = header.dump() + "\n";
  std::vector<unsigned char> bytes(text.begin(), text.end());
  for (const auto& p : checkpoint.model.params()) {
    const auto blob = io::encode_f64_le(p.value.data());
    bytes.insert(bytes.end(), blob.begin(), blob.end());
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  io::write_file(path, bytes);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  const auto bytes = io::read_file(path);
  const auto newline = std::find(bytes.begin(), bytes.end(), static_cast<unsigned char>('\n'));
  if (newline == bytes.end()) throw DataError(path.string() + ": checkpoint header is not terminated");
  json header;
  try {
    header = json::parse(bytes.begin(), newline);
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": invalid checkpoint header (" + e.what() + ")");
  }
  if (header.value("format", "") != "steinmetz-checkpoint") {
    throw DataError(path.string() + ": not a steinmetz checkpoint");
  }
  NetworkSpec spec;
  try {
    const json& s = header.at("spec");
    spec.kind = parse_architecture(s.at("kind").get<std::string>());
    spec.input_dim = s.at("input_dim").get<std::size_t>();
    spec.latent_dim = s.at("latent_dim").get<std::size_t>();
    spec.output_dim = s.at("output_dim").get<std::size_t>();
    spec.task = parse_task(s.at("task").get<std::string>());
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": malformed checkpoint spec (" + e.what() + ")");
  }

  const auto layout = parameter_layout(spec);
  std::size_t offset = static_cast<std::size_t>(newline - bytes.begin()) + 1;
  std::vector<NamedTensor> params;
  for (const auto& [name, shape] : layout) {
    const std::size_t n = shape_product(shape) * 8;
    if (offset + n > bytes.size()) throw DataError(path.string() + ": truncated blob for parameter '" + name + "'");
    std::vector<double> values = io::decode_f64_le(std::span(bytes).subspan(offset, n));
    offset += n;
    params.push_back({name, Tensor(shape, std::move(values))});
  }
  if (offset != bytes.size()) throw DataError(path.string() + ": trailing bytes after the last parameter");

  Checkpoint out{Model(spec, std::move(params)), header.value("seed", std::uint64_t{0}),
                 header.value("epoch", std::size_t{0})};
  return out;
}

}  // namespace steinmetz
