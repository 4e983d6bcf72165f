#pragma once

#include "menuprune/model/complex.hpp"
#include "menuprune/pruning/prune.hpp"
#include "menuprune/solver/menu_solver.hpp"

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace menuprune::io {

/// Shortest text that parses back to the same double.
std::string format_double(double v);

/// RFC-4180 writer with LF line endings.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string_view> header);

  CsvWriter& operator<<(double v);
  CsvWriter& operator<<(long v);
  CsvWriter& operator<<(int v) { return *this << static_cast<long>(v); }
  CsvWriter& operator<<(std::string_view s);
  void end_row();

 private:
  void separator();

  std::ofstream out_;
  std::filesystem::path path_;
  std::size_t columns_ = 0;
  std::size_t column_ = 0;
};

/// Splits one CSV record (quoted fields allowed, no embedded newlines).
std::vector<std::string> split_csv_line(std::string_view line);

void write_solution(const std::filesystem::path& path, const solver::MenuSolution& sol);
/// Reads points, u, q and p back; the remaining fields stay default.
solver::MenuSolution read_solution(const std::filesystem::path& path);

/// id, p, q1, q2
void write_menu(const std::filesystem::path& path, const model::Menu& menu, const Eigen::Vector2d& alpha);
/// id, vertex, x1, x2: one row per vertex, cells in id order.
void write_cells(const std::filesystem::path& path, const model::Complex& complex);
void write_trace(const std::filesystem::path& path, const pruning::PruneTrace& trace, bool timing);

struct LossCurveRow {
  int size = 0;
  double loss = 0;
  double shift = 0;
  double ms = 0;
  double global_ms = 0;
};
void write_losses(const std::filesystem::path& path, std::span<const LossCurveRow> rows, bool with_global);

}  // namespace menuprune::io
