// CSV emission (RFC-4180 style, '.' decimal separator, no locale). Files are
// written to a temporary name and renamed on commit, so failed runs leave no
// partial outputs.

#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace adex {

// Shortest round-trip decimal representation.
std::string fmt_double(double value);

class CsvWriter {
 public:
  // `preamble`, when nonempty, is written verbatim as the first line (used
  // for the ba-capacity header row).
  CsvWriter(const std::filesystem::path& path,
            const std::vector<std::string>& header,
            const std::string& preamble = {});
  ~CsvWriter();  // discards the temp file unless commit() was called

  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void cell(const std::string& value);
  void cell(const char* value);
  void cell(double value);
  void cell(long value);
  void end_row();

  void commit();

 private:
  std::filesystem::path final_path_;
  std::filesystem::path temp_path_;
  std::ofstream out_;
  bool committed_ = false;
  bool row_open_ = false;
};

}  // namespace adex
