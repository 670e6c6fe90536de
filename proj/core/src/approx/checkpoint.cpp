#include "rcrl/approx/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rcrl::approx {
namespace {

constexpr char kMagic[8] = {'R', 'C', 'R', 'L', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void Put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T Get(std::istream& in, const std::filesystem::path& path) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error(path.string() + ": truncated checkpoint");
  return v;
}

void PutDoubles(std::ostream& out, const Eigen::VectorXd& v) {
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
}

Eigen::VectorXd GetDoubles(std::istream& in, std::size_t n, const std::filesystem::path& path) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) throw std::runtime_error(path.string() + ": truncated checkpoint");
  return v;
}

std::filesystem::path SidecarPath(const std::filesystem::path& p) {
  return std::filesystem::path(p.string() + ".json");
}

}  // namespace

void SaveCheckpoint(const std::filesystem::path& path, const std::vector<NamedNetwork>& nets,
                    const std::string& sidecar_json) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(kMagic, sizeof(kMagic));
  Put(out, kVersion);
  Put(out, static_cast<std::uint32_t>(nets.size()));
  for (const NamedNetwork& n : nets) {
    const MlpShape& s = n.net.shape();
    Put(out, static_cast<std::uint32_t>(n.name.size()));
    out.write(n.name.data(), static_cast<std::streamsize>(n.name.size()));
    Put(out, static_cast<std::uint32_t>(s.sizes.size()));
    for (int v : s.sizes) Put(out, static_cast<std::int32_t>(v));
    Put(out, static_cast<std::uint8_t>(s.hidden));
    Put(out, static_cast<std::uint8_t>(s.output));
    if (s.output == OutputActivation::kTanhScaled) {
      PutDoubles(out, s.out_low);
      PutDoubles(out, s.out_high);
    }
    Put(out, static_cast<std::uint64_t>(n.net.params().size()));
    PutDoubles(out, n.net.params());
  }
  if (!out) throw std::runtime_error("failed writing " + path.string());
  std::ofstream side(SidecarPath(path));
  side << sidecar_json << '\n';
  if (!side) throw std::runtime_error("failed writing checkpoint sidecar for " + path.string());
}

std::vector<NamedNetwork> LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error(path.string() + ": not a checkpoint file");
  }
  if (Get<std::uint32_t>(in, path) != kVersion) {
    throw std::runtime_error(path.string() + ": unsupported checkpoint version");
  }
  const std::uint32_t count = Get<std::uint32_t>(in, path);
  if (count > 1024) throw std::runtime_error(path.string() + ": implausible network count");
  std::vector<NamedNetwork> nets;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint32_t name_len = Get<std::uint32_t>(in, path);
    if (name_len > 4096) throw std::runtime_error(path.string() + ": implausible name length");
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    MlpShape shape;
    const std::uint32_t n_sizes = Get<std::uint32_t>(in, path);
    if (n_sizes < 2 || n_sizes > 64) throw std::runtime_error(path.string() + ": bad shape table");
    for (std::uint32_t k = 0; k < n_sizes; ++k) shape.sizes.push_back(Get<std::int32_t>(in, path));
    const auto hidden = Get<std::uint8_t>(in, path);
    const auto output = Get<std::uint8_t>(in, path);
    if (hidden > 1 || output > 2) throw std::runtime_error(path.string() + ": bad activation tag");
    shape.hidden = static_cast<HiddenActivation>(hidden);
    shape.output = static_cast<OutputActivation>(output);
    if (shape.output == OutputActivation::kTanhScaled) {
      const auto out_dim = static_cast<std::size_t>(shape.sizes.back());
      shape.out_low = GetDoubles(in, out_dim, path);
      shape.out_high = GetDoubles(in, out_dim, path);
    }
    Mlp net(shape);
    const auto n = Get<std::uint64_t>(in, path);
    if (n != static_cast<std::uint64_t>(net.params().size())) {
      throw std::runtime_error(path.string() + ": parameter count disagrees with shape table");
    }
    net.set_params(GetDoubles(in, n, path));
    nets.push_back({std::move(name), std::move(net)});
  }
  return nets;
}

std::string LoadSidecar(const std::filesystem::path& checkpoint_path) {
  std::ifstream in(SidecarPath(checkpoint_path));
  if (!in) return {};
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const Mlp& FindNetwork(const std::vector<NamedNetwork>& nets, const std::string& name) {
  for (const NamedNetwork& n : nets) {
    if (n.name == name) return n.net;
  }
  throw std::runtime_error("checkpoint has no network named '" + name + "'");
}

}  // namespace rcrl::approx
