#include "bridgekit/csv.hpp"

#include <stdexcept>

namespace bridgekit {

CsvWriter::CsvWriter(const std::string& path, std::vector<std::string> columns)
    : out_(path), columns_(std::move(columns)) {
  if (!out_) throw std::runtime_error("cannot open for write: " + path);
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (i) out_ << ',';
    out_ << columns_[i];
  }
  out_ << '\n';
}

void CsvWriter::end_row() {
  if (cells_ != columns_.size())
    throw std::logic_error("CsvWriter: row width mismatch");
  out_ << '\n';
  cells_ = 0;
}

void CsvWriter::close() {
  out_.flush();
  if (!out_) throw std::runtime_error("CsvWriter: write failed");
  out_.close();
}

}  // namespace bridgekit
