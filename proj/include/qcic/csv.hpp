#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "qcic/errors.hpp"

namespace qcic {

// Full double precision with '.' decimal separator, locale-independent.
inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Minimal CSV assembly: comma separator, LF line endings, no quoting
// (field content here is always plain identifiers and numbers).
struct CsvBuilder {
  std::string text;

  void row(const std::vector<std::string>& fields) {
    for (size_t i = 0; i < fields.size(); ++i) {
      if (i) text += ',';
      text += fields[i];
    }
    text += '\n';
  }

  void comment(const std::string& line) { text += "# " + line + "\n"; }
};

inline void write_text_file(const std::string& filename, const std::string& content) {
  std::ofstream out(filename, std::ios::binary);
  if (!out) throw IoError("cannot open " + filename + " for writing");
  out << content;
  if (!out) throw IoError("write failed for " + filename);
}

}  // namespace qcic
