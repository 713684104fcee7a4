#pragma once

#include <string>
#include <vector>

namespace cme {

// Shortest round-trip-safe decimal rendering (17 significant digits).
std::string g17(double v);

struct CsvWriter {
  explicit CsvWriter(std::string path);
  void header(const std::vector<std::string>& names);
  void row(const std::vector<std::string>& fields);
  void close();
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::string buf_;
  int n_cols_ = 0;
  bool closed_ = false;
};

}  // namespace cme
