#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pvt {

enum class Color : int { kRed = 0, kGreen = 1, kBlue = 2 };
inline constexpr int kNumColors = 3;

char color_letter(int color);

/// One cell of the 4x4 superpixel: which polarizer direction (index 0..3 in 0/45/90/135
/// order) and which color filter sit at that position.
struct MosaicCell {
  int direction = 0;
  int color = 0;
  friend bool operator==(const MosaicCell&, const MosaicCell&) = default;
};

struct CellOffset {
  int row = 0;
  int col = 0;
  friend bool operator==(const CellOffset&, const CellOffset&) = default;
};

/// Maps (row mod 4, col mod 4) to a (direction, color) pair. Every direction sees R and B
/// once and G twice per superpixel.
class MosaicLayout {
 public:
  /// Sony IMX250MYR-style layout: 2x2 polarizer cell [[90, 45], [135, 0]] and an RGGB
  /// arrangement of those cells inside each 4x4 superpixel.
  static MosaicLayout imx250myr();

  /// Looks up a named preset; throws DomainError for unknown names.
  static MosaicLayout preset(std::string_view name);
  static std::vector<std::string> preset_names();

  /// Validates and wraps a raw table (row-major over the 16 cells).
  static MosaicLayout from_table(std::string name, const std::array<MosaicCell, 16>& cells);

  /// Parses the 16-line text form "row col direction_deg color_letter"; '#' starts a comment.
  static MosaicLayout parse(std::istream& in, std::string name = "custom");
  static MosaicLayout load(const std::filesystem::path& path);

  /// Accepts either a preset name or a path to a table file.
  static MosaicLayout resolve(const std::string& name_or_path);

  const std::string& name() const { return name_; }

  const MosaicCell& at(int row, int col) const { return cells_[(row & 3) * 4 + (col & 3)]; }

  /// Offsets inside the superpixel at which (direction, color) is sampled.
  std::vector<CellOffset> sites(int direction, int color) const;

  /// When every pixel of `direction` sits at a fixed parity (row mod 2, col mod 2), returns
  /// that parity; the direction then forms a stride-2 sub-lattice.
  std::optional<CellOffset> direction_parity(int direction) const;

  std::string to_text() const;

  friend bool operator==(const MosaicLayout& a, const MosaicLayout& b) {
    return a.cells_ == b.cells_;
  }

 private:
  MosaicLayout(std::string name, const std::array<MosaicCell, 16>& cells)
      : name_(std::move(name)), cells_(cells) {}

  std::string name_;
  std::array<MosaicCell, 16> cells_{};
};

}  // namespace pvt
