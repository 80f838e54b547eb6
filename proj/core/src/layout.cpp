#include "pvt/layout.hpp"

#include <fstream>
#include <sstream>

#include "pvt/error.hpp"
#include "pvt/polar.hpp"

namespace pvt {
namespace {

int direction_index_from_degrees(int deg) {
  for (int d = 0; d < kNumDirections; ++d) {
    if (kDirectionDegrees[d] == deg) return d;
  }
  throw FormatError("layout: direction must be one of 0, 45, 90, 135 (got " +
                    std::to_string(deg) + ")");
}

int color_from_letter(const std::string& s) {
  if (s == "R" || s == "r") return 0;
  if (s == "G" || s == "g") return 1;
  if (s == "B" || s == "b") return 2;
  throw FormatError("layout: color must be R, G or B (got '" + s + "')");
}

}  // namespace

char color_letter(int color) { return "RGB"[color]; }

MosaicLayout MosaicLayout::imx250myr() {
  // Polarizer index inside every 2x2 cell: 90 45 / 135 0.
  constexpr int pol[2][2] = {{2, 1}, {3, 0}};
  // Colors of the four 2x2 cells: R G / G B.
  constexpr int col[2][2] = {{0, 1}, {1, 2}};
  std::array<MosaicCell, 16> cells{};
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      cells[r * 4 + c] = {pol[r % 2][c % 2], col[r / 2][c / 2]};
    }
  }
  return from_table("imx250myr", cells);
}

MosaicLayout MosaicLayout::preset(std::string_view name) {
  if (name == "imx250myr") return imx250myr();
  throw DomainError("unknown mosaic layout preset '" + std::string(name) + "'");
}

std::vector<std::string> MosaicLayout::preset_names() { return {"imx250myr"}; }

MosaicLayout MosaicLayout::from_table(std::string name, const std::array<MosaicCell, 16>& cells) {
  int hits[kNumDirections][kNumColors] = {};
  for (const auto& cell : cells) {
    if (cell.direction < 0 || cell.direction >= kNumDirections || cell.color < 0 ||
        cell.color >= kNumColors) {
      throw DomainError("layout '" + name + "': cell outside direction/color range");
    }
    ++hits[cell.direction][cell.color];
  }
  for (int d = 0; d < kNumDirections; ++d) {
    const int expected[kNumColors] = {1, 2, 1};
    for (int c = 0; c < kNumColors; ++c) {
      if (hits[d][c] != expected[c]) {
        throw DomainError("layout '" + name + "': direction " +
                          std::to_string(kDirectionDegrees[d]) + " color " + color_letter(c) +
                          " appears " + std::to_string(hits[d][c]) + " times, expected " +
                          std::to_string(expected[c]));
      }
    }
  }
  return MosaicLayout(std::move(name), cells);
}

MosaicLayout MosaicLayout::parse(std::istream& in, std::string name) {
  std::array<MosaicCell, 16> cells{};
  std::array<bool, 16> seen{};
  std::string line;
  int count = 0;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    int row = 0, col = 0, deg = 0;
    std::string color;
    if (!(fields >> row)) continue;
    if (!(fields >> col >> deg >> color)) {
      throw FormatError("layout: expected 'row col direction color' in line '" + line + "'");
    }
    if (row < 0 || row > 3 || col < 0 || col > 3) {
      throw FormatError("layout: row/col must be in 0..3 in line '" + line + "'");
    }
    const int idx = row * 4 + col;
    if (seen[idx]) throw FormatError("layout: cell (" + std::to_string(row) + ", " +
                                     std::to_string(col) + ") listed twice");
    seen[idx] = true;
    cells[idx] = {direction_index_from_degrees(deg), color_from_letter(color)};
    ++count;
  }
  if (count != 16) {
    throw FormatError("layout: expected 16 cells, found " + std::to_string(count));
  }
  return from_table(std::move(name), cells);
}

MosaicLayout MosaicLayout::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open layout table '" + path.string() + "'");
  return parse(in, path.stem().string());
}

MosaicLayout MosaicLayout::resolve(const std::string& name_or_path) {
  for (const auto& preset_name : preset_names()) {
    if (preset_name == name_or_path) return preset(name_or_path);
  }
  if (std::filesystem::exists(name_or_path)) return load(name_or_path);
  throw DomainError("'" + name_or_path + "' is neither a layout preset nor a table file");
}

std::vector<CellOffset> MosaicLayout::sites(int direction, int color) const {
  std::vector<CellOffset> out;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      if (at(r, c) == MosaicCell{direction, color}) out.push_back({r, c});
    }
  }
  return out;
}

std::optional<CellOffset> MosaicLayout::direction_parity(int direction) const {
  std::optional<CellOffset> parity;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      if (at(r, c).direction != direction) continue;
      const CellOffset here{r % 2, c % 2};
      if (parity && *parity != here) return std::nullopt;
      parity = here;
    }
  }
  return parity;
}

std::string MosaicLayout::to_text() const {
  std::ostringstream out;
  out << "# row col direction color\n";
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      const auto& cell = at(r, c);
      out << r << ' ' << c << ' ' << kDirectionDegrees[cell.direction] << ' '
          << color_letter(cell.color) << '\n';
    }
  }
  return out.str();
}

}  // namespace pvt
