#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "uqg/common.hpp"

namespace uqg {

inline constexpr const char* version_string = "0.1.0";

/// decimal with 15 significant digits (primary CSV number format)
inline std::string fmt15(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.15g", x);
  return buf;
}

/// CSV with '#'-prefixed metadata lines, one header line, 15-digit numbers.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path) : f_(path, std::ios::binary) {
    if (!f_) throw std::runtime_error("CsvWriter: cannot open " + path);
  }

  void meta(const std::string& key, const std::string& value) {
    f_ << "# " << key << " = " << value << "\n";
  }
  void meta(const std::string& key, double value) { meta(key, fmt15(value)); }
  void meta(const std::string& key, long value) { meta(key, std::to_string(value)); }

  void header(const std::vector<std::string>& cols) {
    for (std::size_t i = 0; i < cols.size(); ++i) f_ << (i ? "," : "") << cols[i];
    f_ << "\n";
  }

  void row(const std::vector<double>& vals) {
    for (std::size_t i = 0; i < vals.size(); ++i) f_ << (i ? "," : "") << fmt15(vals[i]);
    f_ << "\n";
  }

  void row_mixed(const std::vector<std::string>& vals) {
    for (std::size_t i = 0; i < vals.size(); ++i) f_ << (i ? "," : "") << vals[i];
    f_ << "\n";
  }

 private:
  std::ofstream f_;
};

/// JSON manifest that pins every parameter of a run; no timestamps, so equal
/// (config, seed) runs produce byte-identical files.
inline void write_manifest(const std::string& path, const std::string& command,
                           const std::vector<std::pair<std::string, std::string>>& params,
                           const std::vector<std::string>& outputs) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("write_manifest: cannot open " + path);
  auto esc = [](const std::string& s) {
    std::string out;
    for (char c : s) {
      if (c == '"' || c == '\\') out += '\\';
      out += c;
    }
    return out;
  };
  f << "{\n  \"tool\": \"uqgraph\",\n  \"version\": \"" << version_string << "\",\n";
  f << "  \"command\": \"" << esc(command) << "\",\n  \"params\": {\n";
  for (std::size_t i = 0; i < params.size(); ++i)
    f << "    \"" << esc(params[i].first) << "\": \"" << esc(params[i].second) << "\""
      << (i + 1 < params.size() ? ",\n" : "\n");
  f << "  },\n  \"outputs\": [";
  for (std::size_t i = 0; i < outputs.size(); ++i)
    f << (i ? ", " : "") << "\"" << esc(outputs[i]) << "\"";
  f << "]\n}\n";
}

}  // namespace uqg
