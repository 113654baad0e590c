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

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace flexsim
{

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kPi = 3.14159265358979323846;

using cdouble = std::complex<double>;
using Precoder = Eigen::MatrixXcd; // M x K, column k is the precoder of user k

// Structural flexibility of the metasurface stack.
//   RSIM  rigid layers, no morphing
//   HSIM  only the first and the final layer morph
//   DSIM  each layer translates as a whole (equal displacement per layer)
//   SFIM  every meta-atom morphs independently
enum class Architecture
{
    RSIM,
    HSIM,
    DSIM,
    SFIM
};

enum class PhaseMode
{
    Continuous,
    Discrete
};

std::string_view to_string(Architecture a);
std::string_view to_string(PhaseMode p);
Architecture parse_architecture(std::string_view s);
PhaseMode parse_phase_mode(std::string_view s);

// Raised when the initial zero-forcing precoder cannot be formed.
class DegenerateScenarioError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Physical description of the transceiver. All quantities SI (m, W, Hz).
struct ScenarioConfig
{
    int num_tx_antennas = 6; // M
    int num_layers = 6;      // L
    int atoms_per_layer = 36; // N
    int atoms_per_row = 6;    // N_x, must divide N
    int num_users = 4;        // K

    double carrier_freq = 28e9;
    double antenna_area = 0.0;    // A_a
    double atom_area = 0.0;       // A_m
    double antenna_spacing = 0.0; // c_a
    double atom_spacing_x = 0.0;  // c_x
    double atom_spacing_z = 0.0;  // c_z
    double x_offset = 0.0;        // x of the reference atom relative to the array
    double z_offset = 0.0;        // z of the reference atom relative to the array

    std::vector<double> nominal_gaps; // per-layer axial spacing, size L
    double morph_range = 0.0;         // symmetric displacement bound
    double min_distance = 0.0;        // minimum inter-layer element distance

    double power_budget = 0.0;       // P_max [W]
    std::vector<double> noise_vars;  // per-user noise power [W], size K

    int num_paths = 5;  // I, path 0 is line of sight
    int quant_bits = 2; // |Q| = 2^bits
    double rate_threshold_factor = 0.95;
    std::uint64_t rng_seed = 1;

    double wavelength() const { return kSpeedOfLight / carrier_freq; }
    int total_atoms() const { return atoms_per_layer * num_layers; }
    int quant_levels() const { return 1 << quant_bits; }

    // Reference parameter set: 28 GHz, M = L = 6, N = 36, K = 4,
    // 25 dBm budget, -104 dBm noise, 6 lambda gaps, lambda/2 morphing range.
    static ScenarioConfig defaults(double carrier_freq = 28e9);

    // Re-derives every length that defaults() expresses in wavelengths.
    void rescale_to_wavelength();

    // Changes L. When keep_total_thickness is set, the nominal gaps are reset
    // to T / L with T the current total thickness.
    void set_num_layers(int layers, bool keep_total_thickness);

    // Changes N with a square-ish grid: N_x is the largest divisor of N not
    // exceeding sqrt(N).
    void set_atoms_per_layer(int atoms);

    void set_num_users(int users);

    // Throws std::invalid_argument describing the first violated invariant.
    void validate() const;
};

struct PathGeometry
{
    cdouble gain;     // alpha
    double azimuth;   // AoD azimuth [rad]
    double elevation; // AoD elevation [rad]
    double distance;  // [m]
};

// paths[k][i]: path i of user k; i = 0 is the line-of-sight path.
struct UserGeometry
{
    std::vector<std::vector<PathGeometry>> paths;

    int num_users() const { return static_cast<int>(paths.size()); }
};

double dbm_to_watt(double dbm);
double watt_to_dbm(double watt);

// Draws user and scatterer positions and path gains. Deterministic in seed.
UserGeometry sample_scenario(const ScenarioConfig &cfg, std::uint64_t seed);

} // namespace flexsim
