// Copyright 2026 The tracknc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "plant/model.hpp"

namespace plant {

/// Ball-on-plate benchmark, forward-Euler discretized with period Ts.
/// State (x1, x1d, x2, x2d, phi1, phi1d, phi2, phi2d): ball position and
/// velocity on both plate axes plus plate angles and angular rates. The
/// input is the pair of angular accelerations, bounded by |u_i| <= 0.1;
/// the output is the ball position (x1, x2).
///
/// The default output set is unconstrained (psi = 1); pass an explicit set
/// to constrain the ball position.
PlantModel ball_on_plate(double Ts);
PlantModel ball_on_plate(double Ts, setgeom::ImplicitSet output_set,
                         double epsilon_interior = 1e-3);

}  // namespace plant
