#include "cme/csv.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace cme {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(std::string path) : path_(std::move(path)) {}

void CsvWriter::header(const std::vector<std::string>& names) {
  if (n_cols_ != 0) throw std::logic_error("CsvWriter: header written twice");
  n_cols_ = static_cast<int>(names.size());
  for (size_t i = 0; i < names.size(); ++i) {
    if (i) buf_ += ',';
    buf_ += names[i];
  }
  buf_ += '\n';
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (static_cast<int>(fields.size()) != n_cols_)
    throw std::logic_error("CsvWriter: row width differs from header");
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i) buf_ += ',';
    buf_ += fields[i];
  }
  buf_ += '\n';
}

void CsvWriter::close() {
  if (closed_) return;
  std::ofstream out(path_, std::ios::binary);
  if (!out) throw std::runtime_error("CsvWriter: cannot open " + path_);
  out.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
  if (!out) throw std::runtime_error("CsvWriter: write failed for " + path_);
  closed_ = true;
}

}  // namespace cme
