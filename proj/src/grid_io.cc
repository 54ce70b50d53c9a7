#include "dvs/grid_io.h"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace dvs {
namespace {

constexpr std::array<char, 4> kMagic = {'D', 'V', 'S', 'G'};

void put_u32(std::ostream& out, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                         static_cast<char>((v >> 16) & 0xff),
                         static_cast<char>((v >> 24) & 0xff)};
  out.write(bytes, 4);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw IoError("truncated DVSG header");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

}  // namespace

void write_grid(std::ostream& out, const Grid<float>& grid) {
  out.write(kMagic.data(), kMagic.size());
  put_u32(out, static_cast<std::uint32_t>(grid.width()));
  put_u32(out, static_cast<std::uint32_t>(grid.height()));
  put_u32(out, static_cast<std::uint32_t>(grid.channels()));
  for (float v : grid.data()) put_u32(out, std::bit_cast<std::uint32_t>(v));
  if (!out) throw IoError("DVSG write failed");
}

Grid<float> read_grid(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw IoError("not a DVSG container (bad magic)");
  }
  const std::uint32_t w = get_u32(in);
  const std::uint32_t h = get_u32(in);
  const std::uint32_t c = get_u32(in);
  if (c == 0 || w > (1u << 16) || h > (1u << 16) || c > 16) {
    throw IoError("implausible DVSG dimensions");
  }
  std::vector<float> data(static_cast<std::size_t>(w) * h * c);
  for (float& v : data) v = std::bit_cast<float>(get_u32(in));
  return Grid<float>(static_cast<int>(w), static_cast<int>(h), static_cast<int>(c),
                     std::move(data));
}

void save(const std::filesystem::path& path, const Image& img) {
  auto out = open_out(path);
  write_grid(out, img.grid());
}

void save(const std::filesystem::path& path, const LabelMap& labels) {
  Grid<float> g(labels.width(), labels.height(), 1);
  std::ranges::transform(labels.data(), g.data().begin(),
                         [](Label id) { return static_cast<float>(id); });
  auto out = open_out(path);
  write_grid(out, g);
}

void save(const std::filesystem::path& path, const FlowField& flow) {
  auto out = open_out(path);
  write_grid(out, flow.grid());
}

Image load_image(const std::filesystem::path& path) {
  auto in = open_in(path);
  return Image(read_grid(in));
}

LabelMap load_labels(const std::filesystem::path& path, int num_classes) {
  auto in = open_in(path);
  Grid<float> g = read_grid(in);
  if (g.channels() != 1) throw IoError("label container must have one channel");
  Grid<Label> labels(g.width(), g.height(), 1);
  Label max_id = 0;
  for (std::size_t i = 0; i < g.data().size(); ++i) {
    const float v = g.data()[i];
    if (!(v >= 0.0f) || v != std::floor(v) || v > 1e7f) {
      throw IoError("label container holds a non-integral or negative id");
    }
    labels.data()[i] = static_cast<Label>(v);
    max_id = std::max(max_id, labels.data()[i]);
  }
  return LabelMap(std::move(labels), num_classes > 0 ? num_classes : max_id + 1);
}

FlowField load_flow(const std::filesystem::path& path) {
  auto in = open_in(path);
  return FlowField(read_grid(in));
}

}  // namespace dvs
