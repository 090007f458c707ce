// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdio>
#include <initializer_list>
#include <ostream>
#include <string>
#include <vector>

#include "ctap/version.hpp"

// CSV output: a leading '#' metadata block (tool version and the full
// parameter echo, so every file can regenerate itself), one header row, then
// data rows with fixed 12-significant-digit formatting.

namespace ctap {

inline std::string format_g12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out, const std::string& command) : out_(out) {
    out_ << "# ctapint " << version << "\n";
    out_ << "# command: " << command << "\n";
    out_ << "# units: energies in units of omega_max; times in units of 1/omega_max\n";
  }

  void meta(const std::string& key, double value) {
    out_ << "# " << key << " = " << format_g12(value) << "\n";
  }
  void meta(const std::string& key, int value) {
    out_ << "# " << key << " = " << value << "\n";
  }
  void meta(const std::string& key, const std::string& value) {
    out_ << "# " << key << " = " << value << "\n";
  }

  template <class Container>
  void header(const Container& columns) {
    bool first = true;
    for (const auto& c : columns) {
      if (!first) out_ << ',';
      out_ << c;
      first = false;
    }
    out_ << '\n';
  }
  void header(std::initializer_list<const char*> columns) {
    header<std::initializer_list<const char*>>(columns);
  }

  template <class Container>
  void row(const Container& values) {
    bool first = true;
    for (double v : values) {
      if (!first) out_ << ',';
      out_ << format_g12(v);
      first = false;
    }
    out_ << '\n';
  }
  void row(std::initializer_list<double> values) {
    row<std::initializer_list<double>>(values);
  }

  void row_int_first(int n, std::initializer_list<double> values) {
    out_ << n;
    for (double v : values) out_ << ',' << format_g12(v);
    out_ << '\n';
  }

 private:
  std::ostream& out_;
};

}  // namespace ctap
