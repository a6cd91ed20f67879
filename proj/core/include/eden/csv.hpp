#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace eden {

/// CSV writer with a pinned dialect: comma separator, '.' decimal point,
/// one header row, LF line endings, floats at 17 significant digits so
/// doubles round-trip bit-exactly.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);

  void header(const std::vector<std::string>& names);

  CsvWriter& field(double value);
  CsvWriter& field(long long value);
  CsvWriter& field(int value) { return field(static_cast<long long>(value)); }
  CsvWriter& field(bool value) { return field(static_cast<long long>(value)); }
  CsvWriter& field(const std::string& value);
  void end_row();

  void flush() { out_.flush(); }

  static std::string format_double(double value);

 private:
  std::ofstream out_;
  bool row_started_ = false;
  void sep();
};

}  // namespace eden
