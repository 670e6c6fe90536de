#include "rcrl/oracle/grid_io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

namespace rcrl::oracle {
namespace {

constexpr char kMagic[8] = {'R', 'C', 'R', 'L', 'G', 'R', 'I', 'D'};
constexpr std::uint32_t kVersion = 1;

std::ofstream OpenOut(const std::filesystem::path& path, std::ios::openmode mode = {}) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, mode);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

std::string Header(int dims) {
  std::string h;
  for (int d = 0; d < dims; ++d) h += "axis" + std::to_string(d) + ",";
  return h + "value\n";
}

template <typename ValueAt>
void WriteCsv(const std::filesystem::path& path, const GridSpec& spec, ValueAt value_at) {
  std::ofstream out = OpenOut(path);
  out << Header(spec.dims());
  char buf[64];
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const StateVec x = spec.Point(i);
    for (int d = 0; d < spec.dims(); ++d) {
      std::snprintf(buf, sizeof(buf), "%.10g,", x[d]);
      out << buf;
    }
    out << value_at(i) << '\n';
  }
}

}  // namespace

void WriteGridCsv(const std::filesystem::path& path, const ValueGrid& grid) {
  WriteCsv(path, grid.spec, [&](std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", grid.values[i]);
    return std::string(buf);
  });
}

void WriteMaskCsv(const std::filesystem::path& path, const KernelMask& mask) {
  WriteCsv(path, mask.spec, [&](std::size_t i) { return mask.feasible[i] ? "1" : "0"; });
}

ValueGrid ReadGridCsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": empty file");
  int dims = 0;
  {
    std::stringstream ss(line);
    std::string col;
    std::vector<std::string> cols;
    while (std::getline(ss, col, ',')) cols.push_back(col);
    if (cols.size() < 2 || cols.back() != "value") {
      throw std::runtime_error(path.string() + ": header must end with 'value'");
    }
    dims = static_cast<int>(cols.size()) - 1;
    for (int d = 0; d < dims; ++d) {
      if (cols[d] != "axis" + std::to_string(d)) {
        throw std::runtime_error(path.string() + ": unexpected column '" + cols[d] + "'");
      }
    }
  }
  std::vector<std::set<double>> coords(dims);
  std::vector<std::pair<std::vector<double>, double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<double> vals;
    while (std::getline(ss, field, ',')) {
      try {
        std::size_t used = 0;
        vals.push_back(std::stod(field, &used));
        if (used != field.size()) throw std::invalid_argument(field);
      } catch (const std::exception&) {
        throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                 ": not a number: '" + field + "'");
      }
    }
    if (static_cast<int>(vals.size()) != dims + 1) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": wrong number of columns");
    }
    for (int d = 0; d < dims; ++d) coords[d].insert(vals[d]);
    const double v = vals.back();
    vals.pop_back();
    rows.emplace_back(std::move(vals), v);
  }
  std::vector<Axis> axes;
  std::vector<std::map<double, int>> index(dims);
  for (int d = 0; d < dims; ++d) {
    if (coords[d].size() < 2) throw std::runtime_error(path.string() + ": axis needs >= 2 nodes");
    axes.push_back({*coords[d].begin(), *coords[d].rbegin(), static_cast<int>(coords[d].size())});
    int i = 0;
    for (double c : coords[d]) index[d][c] = i++;
  }
  ValueGrid grid{GridSpec(axes)};
  if (rows.size() != grid.spec.size()) {
    throw std::runtime_error(path.string() + ": expected " + std::to_string(grid.spec.size()) +
                             " rows for a complete grid, found " + std::to_string(rows.size()));
  }
  std::vector<std::uint8_t> seen(grid.spec.size(), 0);
  for (const auto& [x, v] : rows) {
    std::vector<int> idx(dims);
    for (int d = 0; d < dims; ++d) idx[d] = index[d].at(x[d]);
    const std::size_t flat = grid.spec.Flatten(idx);
    if (seen[flat]) throw std::runtime_error(path.string() + ": duplicate grid node");
    seen[flat] = 1;
    grid.values[flat] = v;
  }
  return grid;
}

void WriteGridBinary(const std::filesystem::path& path, const ValueGrid& grid) {
  std::ofstream out = OpenOut(path, std::ios::binary);
  const std::uint32_t version = kVersion;
  const std::uint32_t dims = static_cast<std::uint32_t>(grid.spec.dims());
  out.write(kMagic, sizeof(kMagic));
  out.write(reinterpret_cast<const char*>(&version), sizeof(version));
  out.write(reinterpret_cast<const char*>(&dims), sizeof(dims));
  for (const Axis& ax : grid.spec.axes()) {
    const std::uint32_t count = static_cast<std::uint32_t>(ax.count), pad = 0;
    out.write(reinterpret_cast<const char*>(&ax.lower), sizeof(double));
    out.write(reinterpret_cast<const char*>(&ax.upper), sizeof(double));
    out.write(reinterpret_cast<const char*>(&count), sizeof(count));
    out.write(reinterpret_cast<const char*>(&pad), sizeof(pad));
  }
  out.write(reinterpret_cast<const char*>(grid.values.data()),
            static_cast<std::streamsize>(grid.values.size() * sizeof(double)));
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

ValueGrid ReadGridBinary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  char magic[8];
  std::uint32_t version = 0, dims = 0;
  in.read(magic, sizeof(magic));
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  in.read(reinterpret_cast<char*>(&dims), sizeof(dims));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error(path.string() + ": not a grid file");
  }
  if (version != kVersion) throw std::runtime_error(path.string() + ": unsupported version");
  if (dims == 0 || dims > 8) throw std::runtime_error(path.string() + ": bad dimension count");
  std::vector<Axis> axes(dims);
  for (Axis& ax : axes) {
    std::uint32_t count = 0, pad = 0;
    in.read(reinterpret_cast<char*>(&ax.lower), sizeof(double));
    in.read(reinterpret_cast<char*>(&ax.upper), sizeof(double));
    in.read(reinterpret_cast<char*>(&count), sizeof(count));
    in.read(reinterpret_cast<char*>(&pad), sizeof(pad));
    ax.count = static_cast<int>(count);
  }
  if (!in) throw std::runtime_error(path.string() + ": truncated header");
  ValueGrid grid{GridSpec(axes)};
  in.read(reinterpret_cast<char*>(grid.values.data()),
          static_cast<std::streamsize>(grid.values.size() * sizeof(double)));
  if (!in) throw std::runtime_error(path.string() + ": truncated values");
  return grid;
}

}  // namespace rcrl::oracle
