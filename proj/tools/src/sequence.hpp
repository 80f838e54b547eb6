#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "pvt/flow.hpp"
#include "pvt/polar.hpp"

namespace pvt::cli {

namespace fs = std::filesystem;

/// A file yields itself; a directory yields its entries with extension `ext`, sorted by name.
/// Throws UsageError when nothing matches.
std::vector<fs::path> list_frames(const fs::path& in, std::string_view ext = ".pvt");

/// Mosaic inputs: .pvt files, or .png files when a directory holds no .pvt.
std::vector<fs::path> list_mosaic_frames(const fs::path& in);

/// frame_0007.pvt style names.
std::string frame_name(int index, std::string_view ext = ".pvt");
std::string flow_name(bool forward, int index);

void ensure_directory(const fs::path& dir);

/// Runs fn(0..n-1) on up to `threads` workers. The first exception is rethrown after all
/// workers stop.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

/// Per-frame RNG seed; frame k of a sequence always draws the same noise.
std::uint64_t frame_seed(std::uint64_t seed, int index);

/// Reads a directions file; a params file is rendered into directions.
PolarFrame read_directions_any(const fs::path& path);

/// Intensity I = S0 / 2 per color channel.
Image intensity_of(const PolarFrame& frame);

/// Flow for frame `index` from `dir`: forward fwd_NNNN.flo (index -> index + 1) or backward
/// bwd_NNNN.flo (index -> index - 1).
FlowField read_flow_for(const fs::path& dir, bool forward, int index);

}  // namespace pvt::cli
