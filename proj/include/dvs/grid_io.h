#pragma once

#include <filesystem>
#include <iosfwd>

#include "dvs/core.h"

namespace dvs {

// "DVSG" container: 4 magic bytes, then little-endian u32 width, height,
// channels, then width*height*channels f32 values in row-major,
// channel-interleaved order. Label maps are stored as one channel of
// integral floats; flow fields as two channels (u, v).
void write_grid(std::ostream& out, const Grid<float>& grid);
Grid<float> read_grid(std::istream& in);

void save(const std::filesystem::path& path, const Image& img);
void save(const std::filesystem::path& path, const LabelMap& labels);
void save(const std::filesystem::path& path, const FlowField& flow);

Image load_image(const std::filesystem::path& path);
// num_classes <= 0 infers max id + 1.
LabelMap load_labels(const std::filesystem::path& path, int num_classes = 0);
FlowField load_flow(const std::filesystem::path& path);

}  // namespace dvs
