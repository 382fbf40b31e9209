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

#include <stdexcept>
#include <string>

namespace aeroprint {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define AEROPRINT_ERROR(Name)                                       \
  struct Name : Error {                                             \
    explicit Name(const std::string& msg = #Name) : Error(msg) {}   \
  }

AEROPRINT_ERROR(NonManifoldInput);
AEROPRINT_ERROR(DegenerateCut);
AEROPRINT_ERROR(NotParallel);
AEROPRINT_ERROR(NotCoplanar);
AEROPRINT_ERROR(EmptyMesh);
AEROPRINT_ERROR(EmptyList);
AEROPRINT_ERROR(NonPositiveDimension);
AEROPRINT_ERROR(MissingProvenance);
AEROPRINT_ERROR(NoTerminalTree);
AEROPRINT_ERROR(CycleDetected);
AEROPRINT_ERROR(Deadlock);
AEROPRINT_ERROR(InsufficientMaterial);
AEROPRINT_ERROR(DegenerateInterface);
AEROPRINT_ERROR(Unsliceable);
AEROPRINT_ERROR(EmptyPath);
AEROPRINT_ERROR(DivergedState);
AEROPRINT_ERROR(EmptyTrace);
AEROPRINT_ERROR(GridMismatch);
AEROPRINT_ERROR(OutOfBounds);
AEROPRINT_ERROR(IoError);

#undef AEROPRINT_ERROR

}  // namespace aeroprint
