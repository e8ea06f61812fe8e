#include "adex/csv.hpp"

#include <charconv>
#include <stdexcept>
#include <system_error>

namespace adex {

std::string fmt_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  if (res.ec != std::errc{}) throw std::runtime_error("fmt_double failed");
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path,
                     const std::vector<std::string>& header,
                     const std::string& preamble)
    : final_path_(path), temp_path_(path.string() + ".part") {
  out_.open(temp_path_, std::ios::binary | std::ios::trunc);
  if (!out_) throw std::runtime_error("cannot open " + temp_path_.string());
  if (!preamble.empty()) out_ << preamble << "\n";
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out_ << ',';
    out_ << header[i];
  }
  out_ << "\n";
}

CsvWriter::~CsvWriter() {
  if (!committed_) {
    out_.close();
    std::error_code ec;
    std::filesystem::remove(temp_path_, ec);
  }
}

void CsvWriter::cell(const std::string& value) {
  if (row_open_) out_ << ',';
  out_ << value;
  row_open_ = true;
}

void CsvWriter::cell(const char* value) { cell(std::string(value)); }

void CsvWriter::cell(double value) { cell(fmt_double(value)); }

void CsvWriter::cell(long value) { cell(std::to_string(value)); }

void CsvWriter::end_row() {
  out_ << "\n";
  row_open_ = false;
}

void CsvWriter::commit() {
  out_.flush();
  if (!out_) throw std::runtime_error("write failed: " + temp_path_.string());
  out_.close();
  std::filesystem::rename(temp_path_, final_path_);
  committed_ = true;
}

}  // namespace adex
