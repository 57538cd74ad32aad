#include "ridebench/csv.hpp"

#include <charconv>
#include <cstring>
#include <sstream>

#include "ridebench/errors.hpp"

namespace ridebench {

std::string format_double(double x) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  (void)ec;
  return std::string(buf, ptr);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  std::string body = line;
  if (!body.empty() && body.back() == '\r') body.pop_back();
  while (true) {
    std::size_t pos = body.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(body.substr(start));
      break;
    }
    out.push_back(body.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

CsvReader::CsvReader(const std::string& path) : in_(path) {
  if (!in_) throw DataError("cannot open file: " + path);
}

bool CsvReader::next_row(std::vector<std::string>& fields) {
  std::string line;
  if (!std::getline(in_, line)) return false;
  ++line_number_;
  fields = split_csv_line(line);
  return true;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace ridebench
