// SPDX-License-Identifier: Apache-2.0
//
// flexsim: flexible stacked intelligent metasurface simulation and optimization
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include "flexsim/ao_driver.hpp"
#include "flexsim/scenario.hpp"

#include <string>

namespace flexsim
{

// YAML layout:
//
//   system:     { antennas, layers, atoms_per_layer, atoms_per_row, users }
//   carrier:    { frequency_hz }
//   geometry:   { antenna_area, atom_area, antenna_spacing, atom_spacing_x,
//                 atom_spacing_z, x_offset, z_offset, nominal_gap,
//                 morph_range, min_distance }          # lengths in wavelengths
//   power:      { budget_dbm, noise_dbm }
//   channel:    { paths, seed }
//   phases:     { quant_bits, rate_threshold_factor }
//   algorithm:  { tol, max_outer, morph_initial_move, ... }
//
// Missing keys keep their current value. Areas are in squared wavelengths.
void load_config_file(const std::string &path, ScenarioConfig &cfg, AlgorithmConfig &algo);
void load_config_string(const std::string &text, ScenarioConfig &cfg, AlgorithmConfig &algo);

} // namespace flexsim
