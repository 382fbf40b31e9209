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

namespace aeroprint::app {

// 0.55 x 0.55 m slab, 0.08 m tall, with a centered 0.20 x 0.20 through-hole
// (21.0 L). Centered on the origin in x/y, resting on z = 0.
geom::TriangleMesh rectangle_fixture();

// Regular hexagonal ring wall, 0.10 m wide and 0.10 m tall (18.93 L). The
// wall midline hexagon has side 0.3155 m: the dimensions of the printed
// hexagon quoted alongside its 18.93 L volume are not mutually consistent,
// so the midline side is calibrated to the volume, which downstream
// statistics depend on.
geom::TriangleMesh hexagon_fixture();

// Returns the fixture by name ("rect" | "hex"), or throws IoError.
geom::TriangleMesh fixture_by_name(const std::string& name);

}  // namespace aeroprint::app
