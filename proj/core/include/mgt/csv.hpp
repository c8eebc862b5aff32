#pragma once

#include <string>
#include <vector>

namespace mgt {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Comma-separated, '.' decimal separator, LF newlines. First row is a header.
CsvTable read_csv(const std::string& path);
double csv_number(const std::string& field, const std::string& context);

// Shortest round-trip formatting so rewrites are reproducible byte for byte.
std::string format_double(double v);

class CsvWriter {
public:
  explicit CsvWriter(std::vector<std::string> header);
  void row(const std::vector<std::string>& fields);
  const std::string& str() const { return out_; }
  void save(const std::string& path) const;

private:
  std::size_t width_;
  std::string out_;
};

}  // namespace mgt
