#include "menuprune/io/csv.hpp"

#include <charconv>
#include <stdexcept>
#include <system_error>

namespace menuprune::io {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  if (res.ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string_view> header)
    : out_(path, std::ios::binary), path_(path), columns_(header.size()) {
  if (!out_) throw std::runtime_error("cannot write " + path.string());
  for (auto h : header) *this << h;
  end_row();
}

void CsvWriter::separator() {
  if (column_ == columns_) throw std::logic_error("CsvWriter: too many fields in " + path_.string());
  if (column_++ > 0) out_ << ',';
}

CsvWriter& CsvWriter::operator<<(double v) {
  separator();
  out_ << format_double(v);
  return *this;
}

CsvWriter& CsvWriter::operator<<(long v) {
  separator();
  out_ << v;
  return *this;
}

CsvWriter& CsvWriter::operator<<(std::string_view s) {
  separator();
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) {
    out_ << s;
    return *this;
  }
  out_ << '"';
  for (char c : s) {
    if (c == '"') out_ << '"';
    out_ << c;
  }
  out_ << '"';
  return *this;
}

void CsvWriter::end_row() {
  if (column_ != columns_) throw std::logic_error("CsvWriter: short row in " + path_.string());
  out_ << '\n';
  column_ = 0;
  if (!out_) throw std::runtime_error("write failed: " + path_.string());
}

std::vector<std::string> split_csv_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char c = line[k];
    if (quoted) {
      if (c != '"') {
        out.back() += c;
      } else if (k + 1 < line.size() && line[k + 1] == '"') {
        out.back() += '"';
        ++k;
      } else {
        quoted = false;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  return out;
}

namespace {

double parse_double(const std::string& s) {
  double v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw std::runtime_error("bad number '" + s + "'");
  return v;
}

}  // namespace

void write_solution(const std::filesystem::path& path, const solver::MenuSolution& sol) {
  CsvWriter w(path, {"i", "x1", "x2", "u", "q1", "q2", "p"});
  for (std::size_t i = 0; i < sol.points.size(); ++i) {
    w << static_cast<long>(i) << sol.points[i](0) << sol.points[i](1) << sol.u[i] << sol.q[i](0) << sol.q[i](1)
      << sol.p[i];
    w.end_row();
  }
}

solver::MenuSolution read_solution(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::filesystem::filesystem_error("cannot open", path, std::make_error_code(std::errc::no_such_file_or_directory));
  std::string line;
  std::getline(in, line);
  const std::vector<std::string> expected{"i", "x1", "x2", "u", "q1", "q2", "p"};
  if (split_csv_line(line) != expected) throw std::runtime_error(path.string() + ": unexpected header");
  solver::MenuSolution sol;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != expected.size()) throw std::runtime_error(path.string() + ": bad row '" + line + "'");
    if (parse_double(f[0]) != static_cast<double>(sol.points.size()))
      throw std::runtime_error(path.string() + ": rows out of order");
    sol.points.emplace_back(parse_double(f[1]), parse_double(f[2]));
    sol.u.push_back(parse_double(f[3]));
    sol.q.emplace_back(parse_double(f[4]), parse_double(f[5]));
    sol.p.push_back(parse_double(f[6]));
  }
  return sol;
}

void write_menu(const std::filesystem::path& path, const model::Menu& menu, const Eigen::Vector2d& alpha) {
  CsvWriter w(path, {"id", "p", "q1", "q2"});
  for (const auto& f : menu.basis) {
    const auto c = model::to_contract(f, alpha);
    w << f.id << c.p << c.q(0) << c.q(1);
    w.end_row();
  }
}

void write_cells(const std::filesystem::path& path, const model::Complex& complex) {
  CsvWriter w(path, {"id", "vertex", "x1", "x2"});
  for (const auto& cell : complex.cells) {
    for (std::size_t k = 0; k < cell.polygon.size(); ++k) {
      const auto& v = cell.polygon.vertex(k);
      w << cell.id << static_cast<long>(k) << v(0) << v(1);
      w.end_row();
    }
  }
}

void write_trace(const std::filesystem::path& path, const pruning::PruneTrace& trace, bool timing) {
  CsvWriter w(path, {"iteration", "removed_id", "nu", "J_lifted", "loss", "lp_solves_cum", "vrep_calls_cum", "ms_cum"});
  for (const auto& r : trace.records) {
    w << r.iteration << r.removed_id << r.nu << r.j_lifted << r.loss << r.lp_solves_cum << r.vrep_calls_cum
      << (timing ? r.ms_cum : 0.0);
    w.end_row();
  }
}

void write_losses(const std::filesystem::path& path, std::span<const LossCurveRow> rows, bool with_global) {
  auto w = with_global ? CsvWriter(path, {"t", "loss", "shift", "ms_cum", "global_ms_cum"})
                       : CsvWriter(path, {"t", "loss", "shift", "ms_cum"});
  for (const auto& r : rows) {
    w << r.size << r.loss << r.shift << r.ms;
    if (with_global) w << r.global_ms;
    w.end_row();
  }
}

}  // namespace menuprune::io
