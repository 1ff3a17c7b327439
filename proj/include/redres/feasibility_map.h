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


#ifndef REDRES_FEASIBILITY_MAP_H_
#define REDRES_FEASIBILITY_MAP_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "redres/path_model.h"

namespace redres {

// Boolean (sample x q7 index) existence table of the inverse kinematics.
struct FeasibilityGrid {
  int rows = 0;  // n + 1
  int cols = 0;  // m
  std::vector<std::uint8_t> bits;
  double t0 = 0.0;
  double delta = 0.0;
  std::string path_id;

  bool at(int i, int j) const {
    return bits[static_cast<std::size_t>(i) * cols + j] != 0;
  }
};

FeasibilityGrid ComputeFeasibility(const ParamGrid& grid, double t0,
                                   const std::string& path_id = "");

// Forward reachability sweep: true iff some j_0..j_n has every cell set and
// |j_i - j_{i-1}| <= band_w.
bool HasBandCorridor(const FeasibilityGrid& fg, int band_w);

// Rows are samples. The CSV carries the metadata in leading comment lines.
void WriteFeasibilityCsv(const FeasibilityGrid& fg, std::ostream& out);
FeasibilityGrid ReadFeasibilityCsv(std::istream& in);

// Binary P5 image, width m, height n + 1, 255 marks a feasible cell.
void WriteFeasibilityPgm(const FeasibilityGrid& fg, std::ostream& out);
FeasibilityGrid ReadFeasibilityPgm(std::istream& in);

}  // namespace redres

#endif  // REDRES_FEASIBILITY_MAP_H_
