#include "spellring/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <map>

#include "spellring/error.hpp"

namespace spellring {

namespace {

constexpr char kMagic[4] = {'S', 'P', 'R', 'M'};

void put_u32(std::ofstream& out, std::uint32_t v) {
  unsigned char buf[4] = {static_cast<unsigned char>(v),
                          static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(buf), 4);
}

std::uint32_t get_u32(std::ifstream& in, const std::string& path) {
  unsigned char buf[4];
  in.read(reinterpret_cast<char*>(buf), 4);
  if (!in) raise(ErrorKind::Format, "truncated checkpoint: " + path);
  return std::uint32_t(buf[0]) | std::uint32_t(buf[1]) << 8 |
         std::uint32_t(buf[2]) << 16 | std::uint32_t(buf[3]) << 24;
}

void put_tensor(std::ofstream& out, const std::string& name,
                const std::vector<std::size_t>& shape,
                const std::vector<float>& data) {
  put_u32(out, std::uint32_t(name.size()));
  out.write(name.data(), std::streamsize(name.size()));
  put_u32(out, std::uint32_t(shape.size()));
  std::size_t elems = 1;
  for (std::size_t d : shape) {
    put_u32(out, std::uint32_t(d));
    elems *= d;
  }
  if (elems != data.size())
    raise(ErrorKind::InvalidArgument, "tensor " + name + " shape mismatch");
  out.write(reinterpret_cast<const char*>(data.data()),
            std::streamsize(data.size() * 4));
}

struct RawTensor {
  std::vector<std::size_t> shape;
  std::vector<float> data;
};

}  // namespace

void save_model(const ModelParams& params, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(ErrorKind::Io, "cannot open checkpoint for write: " + path);

  // const_cast only to reuse the tensor enumeration; nothing is mutated.
  auto tensors = param_tensors(const_cast<ModelParams&>(params));

  out.write(kMagic, 4);
  put_u32(out, kCheckpointVersion);
  put_u32(out, std::uint32_t(tensors.size() + 3));

  put_tensor(out, "meta/modality", {1},
             {float(static_cast<int>(params.modality))});
  put_tensor(out, "meta/dropout", {1}, {float(params.dropout)});
  put_tensor(out, "meta/acoustic_bins", {1}, {float(params.acoustic_bins)});
  for (const auto& t : tensors) put_tensor(out, t.name, t.shape, *t.data);
  if (!out) raise(ErrorKind::Io, "short write on checkpoint: " + path);
}

ModelParams load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorKind::Io, "cannot open checkpoint: " + path);

  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    raise(ErrorKind::Format, "not a model checkpoint (bad magic): " + path);
  std::uint32_t version = get_u32(in, path);
  if (version != kCheckpointVersion)
    raise(ErrorKind::Format, "unsupported checkpoint version " +
                                 std::to_string(version) + ": " + path);

  std::uint32_t count = get_u32(in, path);
  std::map<std::string, RawTensor> raw;
  for (std::uint32_t i = 0; i < count; ++i) {
    std::uint32_t name_len = get_u32(in, path);
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    std::uint32_t ndim = get_u32(in, path);
    RawTensor t;
    std::size_t elems = 1;
    for (std::uint32_t d = 0; d < ndim; ++d) {
      t.shape.push_back(get_u32(in, path));
      elems *= t.shape.back();
    }
    t.data.resize(elems);
    in.read(reinterpret_cast<char*>(t.data.data()),
            std::streamsize(elems * 4));
    if (!in) raise(ErrorKind::Format, "truncated checkpoint: " + path);
    raw[name] = std::move(t);
  }

  auto meta = [&](const char* name) -> float {
    auto it = raw.find(name);
    if (it == raw.end() || it->second.data.size() != 1)
      raise(ErrorKind::Format,
            std::string("checkpoint missing ") + name + ": " + path);
    return it->second.data[0];
  };
  int modality_code = int(meta("meta/modality"));
  if (modality_code < 0 || modality_code > 2)
    raise(ErrorKind::Format, "checkpoint has invalid modality: " + path);
  double dropout = double(meta("meta/dropout"));
  std::size_t bins = std::size_t(meta("meta/acoustic_bins"));

  Rng dummy(0);
  ModelParams params = init_model<float>(
      bins, dropout, static_cast<Modality>(modality_code), dummy);
  for (TensorRef<float>& t : param_tensors(params)) {
    auto it = raw.find(t.name);
    if (it == raw.end())
      raise(ErrorKind::Format,
            "checkpoint missing tensor " + t.name + ": " + path);
    if (it->second.shape != t.shape)
      raise(ErrorKind::Format,
            "checkpoint tensor " + t.name + " has the wrong shape: " + path);
    *t.data = it->second.data;
  }
  return params;
}

}  // namespace spellring
