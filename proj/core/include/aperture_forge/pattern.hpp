#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace apf {

// Binary 7x7 aperture mask. Bit (row * 7 + col) is set when the cell is open.
// A valid pattern has at least one open cell.
class AperturePattern {
 public:
  static constexpr int kSide = 7;
  static constexpr int kCells = kSide * kSide;
  static constexpr std::uint64_t kAllCells = (std::uint64_t{1} << kCells) - 1;

  explicit AperturePattern(std::uint64_t bits);

  // Seven rows of seven '0'/'1' characters.
  static AperturePattern from_rows(std::string_view rows);

  bool open(int row, int col) const { return (bits_ >> (row * kSide + col)) & 1u; }
  int open_count() const;
  std::uint64_t bits() const { return bits_; }

  AperturePattern rotated180() const;
  bool point_symmetric() const { return rotated180().bits_ == bits_; }

  // Row-major '0'/'1' string of length 49; orders patterns lexicographically.
  std::string bitstring() const;
  // Seven newline-terminated rows.
  std::string rows() const;

  bool operator==(const AperturePattern&) const = default;

 private:
  std::uint64_t bits_;
};

namespace patterns {

AperturePattern full_open();
AperturePattern pinhole();
// Disk inscribed in the 7x7 grid (37 cells): the open circular aperture.
AperturePattern open_circular();
// The n cells nearest the grid center: a round aperture with throughput n.
AperturePattern conventional(int n);

}  // namespace patterns

AperturePattern parse_pattern(std::string_view text);
AperturePattern read_pattern_file(const std::filesystem::path& path);
void write_pattern_file(const std::filesystem::path& path, const AperturePattern& pattern,
                        std::string_view comment = {});

}  // namespace apf
