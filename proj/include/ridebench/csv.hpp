#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace ridebench {

// Shortest round-trip decimal representation of a double. All numeric CSV
// output goes through this so repeated runs are byte-identical.
std::string format_double(double x);

// Splits one CSV line on commas. No quoting support; the formats in this
// project never emit quoted fields. Trailing CR is stripped.
std::vector<std::string> split_csv_line(const std::string& line);

std::string trim(const std::string& s);

// Line-oriented CSV reader that tracks line numbers for error messages.
class CsvReader {
public:
  explicit CsvReader(const std::string& path);

  // Returns false at EOF.
  bool next_row(std::vector<std::string>& fields);
  int line_number() const { return line_number_; }

private:
  std::ifstream in_;
  int line_number_ = 0;
};

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace ridebench
