#include "coref/checkpoint.h"

#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace coref {
namespace {

constexpr char kMagic[4] = {'C', 'R', 'C', 'K'};

// The container is defined little-endian; this implementation targets
// little-endian hosts and writes native scalar bytes.
template <typename T>
void write_scalar(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_scalar(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("checkpoint: unexpected end of file");
  return v;
}

void write_string(std::ostream& out, const std::string& s) {
  write_scalar<uint64_t>(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& in) {
  const uint64_t n = read_scalar<uint64_t>(in);
  std::string s(n, '\0');
  in.read(s.data(), static_cast<std::streamsize>(n));
  if (!in) throw std::runtime_error("checkpoint: unexpected end of file");
  return s;
}

void write_values(std::ostream& out, const std::vector<real_t>& values) {
  for (real_t v : values) write_scalar<double>(out, static_cast<double>(v));
}

void read_values(std::istream& in, std::vector<real_t>* values) {
  for (real_t& v : *values) {
    v = static_cast<real_t>(read_scalar<double>(in));
  }
}

void write_table(std::ostream& out, const EmbeddingTable& table) {
  write_scalar<uint32_t>(out, static_cast<uint32_t>(table.dim()));
  write_scalar<uint8_t>(out, table.lowercase_fallback() ? 1 : 0);
  const auto entries = table.sorted_entries();
  write_scalar<uint64_t>(out, entries.size());
  for (const auto& [token, values] : entries) {
    write_string(out, token);
    write_values(out, values);
  }
}

EmbeddingTable read_table(std::istream& in) {
  const int dim = static_cast<int>(read_scalar<uint32_t>(in));
  const bool lowercase = read_scalar<uint8_t>(in) != 0;
  EmbeddingTable table(dim, lowercase);
  const uint64_t count = read_scalar<uint64_t>(in);
  for (uint64_t e = 0; e < count; ++e) {
    std::string token = read_string(in);
    std::vector<real_t> values(static_cast<size_t>(dim));
    read_values(in, &values);
    // Stored vectors are already normalized; reinserting them raw keeps
    // the round trip bit-exact.
    table.add_raw(token, std::move(values));
  }
  return table;
}

}  // namespace

void save_checkpoint(const std::string& path, const CorefModel& model,
                     const TrainState* state) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write checkpoint file " + path);
  }
  out.write(kMagic, sizeof(kMagic));
  write_scalar<uint32_t>(out, kCheckpointVersion);
  write_string(out, config_to_json(model.config()));

  const auto& codepoints = model.char_vocab().codepoints();
  write_scalar<uint64_t>(out, codepoints.size() - 1);
  for (size_t i = 1; i < codepoints.size(); ++i) {
    write_scalar<uint32_t>(out, codepoints[i]);
  }

  write_table(out, model.glove());
  write_table(out, model.turian());

  const auto& params = model.registry().items();
  write_scalar<uint64_t>(out, params.size());
  for (const auto& p : params) {
    write_string(out, p->name);
    write_scalar<uint32_t>(out, static_cast<uint32_t>(p->value.rank()));
    for (int d : p->value.shape) write_scalar<uint32_t>(out, uint32_t(d));
    write_values(out, p->value.data);
  }

  write_scalar<uint8_t>(out, state != nullptr ? 1 : 0);
  if (state != nullptr) {
    if (state->adam.m.size() != params.size()) {
      throw std::invalid_argument(
          "checkpoint: optimizer state does not match the parameters");
    }
    for (size_t p = 0; p < params.size(); ++p) {
      write_values(out, state->adam.m[p].data);
      write_values(out, state->adam.v[p].data);
    }
    write_scalar<int64_t>(out, state->adam.step);
    write_scalar<int64_t>(out, state->epoch);
    write_scalar<int64_t>(out, state->best_epoch);
    write_scalar<double>(out, state->best_dev_f1);
    write_string(out, state->rng.serialize());
  }
  if (!out) throw std::runtime_error("checkpoint write failed: " + path);
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open checkpoint file " + path);
  }
  char magic[4];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("not a checkpoint file: " + path);
  }
  const uint32_t version = read_scalar<uint32_t>(in);
  if (version != kCheckpointVersion) {
    throw std::runtime_error(
        "checkpoint version mismatch in " + path + ": found " +
        std::to_string(version) + ", expected " +
        std::to_string(kCheckpointVersion));
  }

  RunConfig config = config_from_json(read_string(in));

  const uint64_t num_chars = read_scalar<uint64_t>(in);
  std::vector<uint32_t> codepoints(num_chars);
  for (auto& cp : codepoints) cp = read_scalar<uint32_t>(in);
  CharVocab vocab = CharVocab::from_codepoints(codepoints);

  EmbeddingTable glove = read_table(in);
  EmbeddingTable turian = read_table(in);

  LoadedCheckpoint loaded;
  loaded.model = std::make_unique<CorefModel>(config, std::move(vocab),
                                              std::move(glove),
                                              std::move(turian), config.seed);

  ad::ParameterRegistry& reg = loaded.model->registry();
  const uint64_t num_params = read_scalar<uint64_t>(in);
  if (num_params != reg.size()) {
    throw std::runtime_error("checkpoint: parameter count mismatch");
  }
  for (uint64_t p = 0; p < num_params; ++p) {
    const std::string name = read_string(in);
    const uint32_t rank = read_scalar<uint32_t>(in);
    std::vector<int> shape(rank);
    for (auto& d : shape) d = static_cast<int>(read_scalar<uint32_t>(in));
    ad::Parameter* param = reg.require(name);
    if (param->value.shape != shape) {
      throw std::runtime_error("checkpoint: shape mismatch for " + name);
    }
    read_values(in, &param->value.data);
  }

  if (read_scalar<uint8_t>(in) != 0) {
    TrainState state;
    state.adam.initialize(reg);
    for (size_t p = 0; p < reg.size(); ++p) {
      read_values(in, &state.adam.m[p].data);
      read_values(in, &state.adam.v[p].data);
    }
    state.adam.step = read_scalar<int64_t>(in);
    state.epoch = static_cast<int>(read_scalar<int64_t>(in));
    state.best_epoch = static_cast<int>(read_scalar<int64_t>(in));
    state.best_dev_f1 = read_scalar<double>(in);
    state.rng.deserialize(read_string(in));
    loaded.state = std::move(state);
  }
  return loaded;
}

}  // namespace coref
