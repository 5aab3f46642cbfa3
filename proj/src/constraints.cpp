// Copyright 2026 The dpobmc Authors
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

#include "dpobmc/constraints.hpp"

namespace dpobmc {

std::string_view to_string(ProjectionMode mode) {
  switch (mode) {
    case ProjectionMode::Intersection: return "intersection";
    case ProjectionMode::Dykstra: return "dykstra";
    case ProjectionMode::NuclearOnly: return "nuclear_only";
  }
  return "?";
}

ProjectionMode parse_projection_mode(std::string_view name) {
  if (name == "intersection") return ProjectionMode::Intersection;
  if (name == "dykstra") return ProjectionMode::Dykstra;
  if (name == "nuclear_only" || name == "nuclear") return ProjectionMode::NuclearOnly;
  throw ConfigError("unknown projection mode '" + std::string(name) + "'");
}

}  // namespace dpobmc
