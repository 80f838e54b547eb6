#include "sequence.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

#include "config.hpp"
#include "pvt/error.hpp"
#include "pvt/io.hpp"

namespace pvt::cli {

std::vector<fs::path> list_frames(const fs::path& in, std::string_view ext) {
  if (fs::is_regular_file(in)) return {in};
  if (!fs::is_directory(in)) throw UsageError("input '" + in.string() + "' does not exist");
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(in)) {
    if (e.is_regular_file() && e.path().extension() == ext) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) throw UsageError("no " + std::string(ext) + " files in '" + in.string() + "'");
  return out;
}

std::vector<fs::path> list_mosaic_frames(const fs::path& in) {
  if (!fs::is_directory(in)) return list_frames(in);
  try {
    return list_frames(in, ".pvt");
  } catch (const UsageError&) {
    return list_frames(in, ".png");
  }
}

std::string frame_name(int index, std::string_view ext) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%04d", index);
  return std::string(buf) + std::string(ext);
}

std::string flow_name(bool forward, int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s_%04d.flo", forward ? "fwd" : "bwd", index);
  return buf;
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(dir.string() + ": cannot create directory: " + ec.message());
}

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  const int workers = std::max(1, std::min(threads, n));
  if (workers == 1) {
    for (int k = 0; k < n; ++k) fn(k);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int k = next++; k < n; k = next++) {
        try {
          fn(k);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::uint64_t frame_seed(std::uint64_t seed, int index) {
  return seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(index + 1));
}

PolarFrame read_directions_any(const fs::path& path) {
  PvtTensor t = read_pvt(path);
  if (t.header.tag == PvtTag::kDirections && t.slices.size() == 4) {
    PolarFrame f;
    for (int d = 0; d < 4; ++d) f.dirs[d] = std::move(t.slices[d]);
    return f;
  }
  if (t.header.tag == PvtTag::kParams && t.slices.size() == 3) {
    PolarParams p{std::move(t.slices[0]), std::move(t.slices[1]), std::move(t.slices[2]), true};
    return render_directions(p);
  }
  throw FormatError(path.string() + ": expected a directions or params PVT file");
}

Image intensity_of(const PolarFrame& frame) {
  return stokes_from_directions(frame).s0 * 0.5;
}

FlowField read_flow_for(const fs::path& dir, bool forward, int index) {
  FlowField f = read_flo(dir / flow_name(forward, index));
  f.source_time = index;
  f.target_time = forward ? index + 1 : index - 1;
  return f;
}

}  // namespace pvt::cli
