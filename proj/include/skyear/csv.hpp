#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace skyear::csv {

// Shortest round-trip decimal text with '.' separator, independent of locale.
std::string number(double v);
std::string number(std::optional<double> v);  // empty field when absent
std::string integer(long long v);

class Table {
 public:
  explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}

  void add(std::vector<std::string> row);
  std::size_t rows() const { return rows_.size(); }
  std::string str() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

// FNV-1a over the bytes; used for reproducibility checks in manifests.
std::string checksum(const std::string& bytes);

}  // namespace skyear::csv
