// Copyright 2025 The Aeroprint Authors.
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

#pragma once

#include <string>

#include "aeroprint/geom/core.hpp"

namespace aeroprint::geom {

// STL units relative to meters (1.0 = file is in meters).
struct StlOptions {
  double unit_scale = 1.0;
  bool binary = true;
};

// Reads binary or ASCII STL (auto-detected), welds duplicate vertices.
TriangleMesh read_stl(const std::string& path, double unit_scale = 1.0);

void write_stl(const std::string& path, const TriangleMesh& mesh,
               const StlOptions& options = {});

}  // namespace aeroprint::geom
