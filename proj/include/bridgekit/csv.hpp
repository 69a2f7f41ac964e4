#pragma once

#include <fstream>
#include <iomanip>
#include <string>
#include <vector>

namespace bridgekit {

// Minimal CSV emitter: fixed header, stable column order, enough digits to
// round-trip doubles bit-exactly.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, std::vector<std::string> columns);

  template <typename T>
  CsvWriter& cell(const T& v) {
    if (cells_) out_ << ',';
    if constexpr (std::is_floating_point_v<T>) {
      out_ << std::setprecision(17) << v;
    } else {
      out_ << v;
    }
    ++cells_;
    return *this;
  }

  void end_row();
  void close();

 private:
  std::ofstream out_;
  std::vector<std::string> columns_;
  std::size_t cells_ = 0;
};

}  // namespace bridgekit
