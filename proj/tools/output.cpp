#include "output.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "unigraph/errors.hpp"

namespace unigraph::cli {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void Fnv1a::add(std::string_view bytes) {
  for (const unsigned char c : bytes) {
    h_ ^= c;
    h_ *= 0x100000001b3ull;
  }
}

std::string Fnv1a::hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h_));
  return buf;
}

std::string hash_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  Fnv1a h;
  h.add(ss.str());
  return h.hex();
}

void RunInfo::finalize() {
  Fnv1a h;
  h.add(command);
  for (const auto& [k, v] : config) {
    h.add("\n");
    h.add(k);
    h.add("=");
    h.add(v);
  }
  config_hash = h.hex();
}

std::string RunInfo::comment_line() const {
  return "# unigraph " UNIGRAPH_VERSION " command=" + command + " seed=" + std::to_string(seed) +
         " config_hash=" + config_hash;
}

nlohmann::json RunInfo::meta() const {
  nlohmann::json m;
  m["tool"] = "unigraph";
  m["version"] = UNIGRAPH_VERSION;
  m["command"] = command;
  m["seed"] = seed;
  m["config_hash"] = config_hash;
  return m;
}

OutputDir::OutputDir(std::filesystem::path dir, bool force) : dir_(std::move(dir)), force_(force) {
  std::filesystem::create_directories(dir_);
}

void OutputDir::check_free(const std::vector<std::string>& names) const {
  if (force_) return;
  for (const auto& n : names)
    if (std::filesystem::exists(dir_ / n))
      throw ValidationError("refusing to overwrite " + (dir_ / n).string() + " (use --force)");
}

std::string table_file_name(const Table& t, Format f) { return t.name + (f == Format::csv ? ".csv" : ".json"); }

void OutputDir::write_table(const Table& t, Format f, const RunInfo& info) {
  if (f == Format::csv) {
    std::string out = info.comment_line() + "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
    out += "\n";
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out += ",";
        out += format_double(row[i]);
      }
      out += "\n";
    }
    write_text(table_file_name(t, f), out);
    return;
  }
  nlohmann::json doc;
  doc["meta"] = info.meta();
  doc["columns"] = t.columns;
  doc["rows"] = t.rows;
  write_json(table_file_name(t, f), doc);
}

void OutputDir::write_json(const std::string& name, const nlohmann::json& doc) { write_text(name, doc.dump(2) + "\n"); }

void OutputDir::write_text(const std::string& name, const std::string& text) {
  check_free({name});
  std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write " + (dir_ / name).string());
  out << text;
  written_.push_back(name);
}

}  // namespace unigraph::cli
