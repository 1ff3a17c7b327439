// Copyright 2026 The redres Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "redres/feasibility_map.h"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "redres/format.h"

namespace redres {
namespace {

void ParseMeta(const std::string& line, FeasibilityGrid& fg) {
  std::istringstream ss(line.substr(1));
  std::string token;
  while (ss >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = token.substr(0, eq);
    const std::string value = token.substr(eq + 1);
    try {
      if (key == "path") fg.path_id = value;
      if (key == "t0") fg.t0 = std::stod(value);
      if (key == "delta") fg.delta = std::stod(value);
    } catch (const std::exception&) {
      throw std::runtime_error("feasibility file: bad metadata " + token);
    }
  }
}

std::string MetaLine(const FeasibilityGrid& fg) {
  return "# path=" + (fg.path_id.empty() ? std::string("-") : fg.path_id) +
         " t0=" + FormatDouble(fg.t0) + " delta=" + FormatDouble(fg.delta);
}

}  // namespace

FeasibilityGrid ComputeFeasibility(const ParamGrid& grid, double t0,
                                   const std::string& path_id) {
  FeasibilityGrid fg;
  fg.rows = grid.num_samples();
  fg.cols = grid.m();
  fg.t0 = t0;
  fg.delta = grid.delta();
  fg.path_id = path_id;
  fg.bits.resize(static_cast<std::size_t>(fg.rows) * fg.cols);
  for (int i = 0; i < fg.rows; ++i) {
    for (int j = 0; j < fg.cols; ++j) {
      fg.bits[static_cast<std::size_t>(i) * fg.cols + j] = grid.present(i, j);
    }
  }
  return fg;
}

bool HasBandCorridor(const FeasibilityGrid& fg, int band_w) {
  if (band_w < 0) throw std::invalid_argument("band_w must be >= 0");
  if (fg.rows == 0 || fg.cols == 0) return false;
  const int m = fg.cols;
  std::vector<int> reach(m), prefix(m + 1);
  for (int j = 0; j < m; ++j) reach[j] = fg.at(0, j);
  for (int i = 1; i < fg.rows; ++i) {
    prefix[0] = 0;
    for (int j = 0; j < m; ++j) prefix[j + 1] = prefix[j] + reach[j];
    bool any = false;
    for (int j = 0; j < m; ++j) {
      const int lo = std::max(0, j - band_w);
      const int hi = std::min(m - 1, j + band_w);
      reach[j] = fg.at(i, j) && prefix[hi + 1] - prefix[lo] > 0;
      any = any || reach[j];
    }
    if (!any) return false;
  }
  return std::any_of(reach.begin(), reach.end(), [](int r) { return r; });
}

void WriteFeasibilityCsv(const FeasibilityGrid& fg, std::ostream& out) {
  out << MetaLine(fg) << '\n';
  std::string row;
  for (int i = 0; i < fg.rows; ++i) {
    row.clear();
    for (int j = 0; j < fg.cols; ++j) {
      if (j > 0) row += ',';
      row += fg.at(i, j) ? '1' : '0';
    }
    out << row << '\n';
  }
}

FeasibilityGrid ReadFeasibilityCsv(std::istream& in) {
  FeasibilityGrid fg;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      ParseMeta(line, fg);
      continue;
    }
    int cols = 0;
    for (std::size_t k = 0; k < line.size(); ++k) {
      const char c = line[k];
      const bool cell_pos = k % 2 == 0;
      if (cell_pos && (c == '0' || c == '1')) {
        fg.bits.push_back(c == '1');
        ++cols;
      } else if (cell_pos || c != ',') {
        throw std::runtime_error("feasibility csv: bad row " +
                                 std::to_string(fg.rows));
      }
    }
    if (fg.rows > 0 && cols != fg.cols) {
      throw std::runtime_error("feasibility csv: ragged rows");
    }
    fg.cols = cols;
    ++fg.rows;
  }
  return fg;
}

void WriteFeasibilityPgm(const FeasibilityGrid& fg, std::ostream& out) {
  out << "P5\n" << MetaLine(fg) << '\n'
      << fg.cols << ' ' << fg.rows << "\n255\n";
  std::vector<char> pixels(fg.bits.size());
  std::transform(fg.bits.begin(), fg.bits.end(), pixels.begin(),
                 [](std::uint8_t b) { return b ? char(255) : char(0); });
  out.write(pixels.data(), static_cast<std::streamsize>(pixels.size()));
}

FeasibilityGrid ReadFeasibilityPgm(std::istream& in) {
  FeasibilityGrid fg;
  std::string magic;
  in >> magic;
  if (magic != "P5") throw std::runtime_error("pgm: expected P5");
  int values[3];
  for (int k = 0; k < 3;) {
    in >> std::ws;
    if (in.peek() == '#') {
      std::string line;
      std::getline(in, line);
      ParseMeta(line, fg);
      continue;
    }
    if (!(in >> values[k])) throw std::runtime_error("pgm: bad header");
    ++k;
  }
  if (values[2] != 255) throw std::runtime_error("pgm: expected maxval 255");
  if (values[0] < 0 || values[1] < 0) throw std::runtime_error("pgm: size");
  in.get();  // single whitespace before the raster
  fg.cols = values[0];
  fg.rows = values[1];
  std::vector<char> pixels(static_cast<std::size_t>(fg.rows) * fg.cols);
  in.read(pixels.data(), static_cast<std::streamsize>(pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(pixels.size())) {
    throw std::runtime_error("pgm: truncated raster");
  }
  fg.bits.resize(pixels.size());
  for (std::size_t k = 0; k < pixels.size(); ++k) {
    fg.bits[k] = static_cast<unsigned char>(pixels[k]) >= 128;
  }
  return fg;
}

}  // namespace redres
