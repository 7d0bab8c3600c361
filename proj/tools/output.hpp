#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace unigraph::cli {

enum class Format { csv, json };

/// Numeric table written as CSV (one comment line, one header line) or as JSON.
struct Table {
  std::string name;  // file stem
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// Shortest round-trip decimal, independent of the C locale.
std::string format_double(double x);

class Fnv1a {
 public:
  void add(std::string_view bytes);
  std::uint64_t value() const { return h_; }
  std::string hex() const;

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ull;
};

std::string hash_file(const std::filesystem::path& path);

/// Every file of one command run shares this header data.
struct RunInfo {
  std::string command;
  std::vector<std::pair<std::string, std::string>> config;  // canonical order
  std::uint64_t seed = 0;
  std::string config_hash;

  void finalize();  // computes config_hash from command and config
  std::string comment_line() const;
  nlohmann::json meta() const;
};

/// Refuses to touch existing files unless `force`; creates the directory.
class OutputDir {
 public:
  OutputDir(std::filesystem::path dir, bool force);

  void check_free(const std::vector<std::string>& names) const;
  std::filesystem::path path(const std::string& name) const { return dir_ / name; }
  const std::filesystem::path& dir() const { return dir_; }

  void write_table(const Table& t, Format f, const RunInfo& info);
  void write_json(const std::string& name, const nlohmann::json& doc);
  void write_text(const std::string& name, const std::string& text);

  const std::vector<std::string>& written() const { return written_; }

 private:
  std::filesystem::path dir_;
  bool force_;
  std::vector<std::string> written_;
};

std::string table_file_name(const Table& t, Format f);

}  // namespace unigraph::cli
