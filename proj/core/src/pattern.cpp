#include "aperture_forge/pattern.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <fstream>
#include <sstream>
#include <vector>

#include "aperture_forge/error.hpp"

namespace apf {

namespace {

constexpr int kCenter = AperturePattern::kSide / 2;

int cell(int row, int col) { return row * AperturePattern::kSide + col; }

std::string_view trim_right(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

AperturePattern::AperturePattern(std::uint64_t bits) : bits_(bits) {
  if (bits & ~kAllCells) throw InvalidPatternError("pattern bits beyond the 7x7 grid");
  if (bits == 0) throw InvalidPatternError("pattern has no open cell");
}

AperturePattern AperturePattern::from_rows(std::string_view rows) { return parse_pattern(rows); }

int AperturePattern::open_count() const { return std::popcount(bits_); }

AperturePattern AperturePattern::rotated180() const {
  std::uint64_t out = 0;
  for (int i = 0; i < kCells; ++i)
    if ((bits_ >> i) & 1u) out |= std::uint64_t{1} << (kCells - 1 - i);
  return AperturePattern(out);
}

std::string AperturePattern::bitstring() const {
  std::string s(kCells, '0');
  for (int i = 0; i < kCells; ++i)
    if ((bits_ >> i) & 1u) s[i] = '1';
  return s;
}

std::string AperturePattern::rows() const {
  std::string s;
  const std::string bits = bitstring();
  for (int r = 0; r < kSide; ++r) {
    s.append(bits, r * kSide, kSide);
    s.push_back('\n');
  }
  return s;
}

namespace patterns {

AperturePattern full_open() { return AperturePattern(AperturePattern::kAllCells); }

AperturePattern pinhole() { return AperturePattern(std::uint64_t{1} << cell(kCenter, kCenter)); }

AperturePattern open_circular() {
  // Cell centers within radius 3.5 of the grid center.
  std::uint64_t bits = 0;
  for (int r = 0; r < AperturePattern::kSide; ++r)
    for (int c = 0; c < AperturePattern::kSide; ++c) {
      const int d2 = (r - kCenter) * (r - kCenter) + (c - kCenter) * (c - kCenter);
      if (4 * d2 <= 49) bits |= std::uint64_t{1} << cell(r, c);
    }
  return AperturePattern(bits);
}

AperturePattern conventional(int n) {
  if (n < 1 || n > AperturePattern::kCells) throw DomainError("conventional aperture needs 1 <= n <= 49");
  std::vector<std::array<int, 3>> cells;  // (d2, row, col)
  for (int r = 0; r < AperturePattern::kSide; ++r)
    for (int c = 0; c < AperturePattern::kSide; ++c)
      cells.push_back({(r - kCenter) * (r - kCenter) + (c - kCenter) * (c - kCenter), r, c});
  std::sort(cells.begin(), cells.end());
  std::uint64_t bits = 0;
  for (int i = 0; i < n; ++i) bits |= std::uint64_t{1} << cell(cells[i][1], cells[i][2]);
  return AperturePattern(bits);
}

}  // namespace patterns

AperturePattern parse_pattern(std::string_view text) {
  std::vector<std::string_view> rows;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    line = trim_right(line);
    if (rows.empty() && (line.empty() || line.front() == '#')) continue;
    if (line.empty() && rows.size() == static_cast<std::size_t>(AperturePattern::kSide)) continue;
    rows.push_back(line);
  }
  if (rows.size() != static_cast<std::size_t>(AperturePattern::kSide)) {
    throw FormatError("pattern: expected 7 rows, got " + std::to_string(rows.size()));
  }
  std::uint64_t bits = 0;
  for (int r = 0; r < AperturePattern::kSide; ++r) {
    if (rows[r].size() != static_cast<std::size_t>(AperturePattern::kSide)) {
      throw FormatError("pattern: row " + std::to_string(r + 1) + " must have 7 characters");
    }
    for (int c = 0; c < AperturePattern::kSide; ++c) {
      const char ch = rows[r][c];
      if (ch == '1') {
        bits |= std::uint64_t{1} << cell(r, c);
      } else if (ch != '0') {
        throw FormatError("pattern: row " + std::to_string(r + 1) + " has a character other than 0/1");
      }
    }
  }
  return AperturePattern(bits);
}

AperturePattern read_pattern_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_pattern(ss.str());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_pattern_file(const std::filesystem::path& path, const AperturePattern& pattern,
                        std::string_view comment) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  if (!comment.empty()) out << "# " << comment << '\n';
  out << pattern.rows();
}

}  // namespace apf
