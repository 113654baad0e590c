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

#include "flexsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace flexsim
{

std::string_view to_string(Architecture a)
{
    switch (a)
    {
    case Architecture::RSIM:
        return "RSIM";
    case Architecture::HSIM:
        return "HSIM";
    case Architecture::DSIM:
        return "DSIM";
    case Architecture::SFIM:
        return "SFIM";
    }
    return "?";
}

std::string_view to_string(PhaseMode p)
{
    return p == PhaseMode::Continuous ? "continuous" : "discrete";
}

static std::string upper(std::string_view s)
{
    std::string out(s);
    for (auto &c : out)
        c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

Architecture parse_architecture(std::string_view s)
{
    const std::string u = upper(s);
    if (u == "RSIM")
        return Architecture::RSIM;
    if (u == "HSIM")
        return Architecture::HSIM;
    if (u == "DSIM")
        return Architecture::DSIM;
    if (u == "SFIM")
        return Architecture::SFIM;
    throw std::invalid_argument("unknown architecture: " + std::string(s));
}

PhaseMode parse_phase_mode(std::string_view s)
{
    const std::string u = upper(s);
    if (u == "CONTINUOUS")
        return PhaseMode::Continuous;
    if (u == "DISCRETE")
        return PhaseMode::Discrete;
    throw std::invalid_argument("unknown phase mode: " + std::string(s));
}

double dbm_to_watt(double dbm) { return std::pow(10.0, dbm / 10.0) * 1e-3; }
double watt_to_dbm(double watt) { return 10.0 * std::log10(watt * 1e3); }

ScenarioConfig ScenarioConfig::defaults(double carrier_freq)
{
    ScenarioConfig c;
    c.carrier_freq = carrier_freq;
    c.nominal_gaps.assign(static_cast<size_t>(c.num_layers), 0.0);
    c.power_budget = dbm_to_watt(25.0);
    c.noise_vars.assign(static_cast<size_t>(c.num_users), dbm_to_watt(-104.0));
    c.rescale_to_wavelength();
    return c;
}

void ScenarioConfig::rescale_to_wavelength()
{
    const double lam = wavelength();
    antenna_area = lam * lam / 4.0;
    atom_area = lam * lam / 4.0;
    antenna_spacing = lam / 2.0;
    atom_spacing_x = lam / 2.0;
    atom_spacing_z = lam / 2.0;
    std::fill(nominal_gaps.begin(), nominal_gaps.end(), 6.0 * lam);
    morph_range = lam / 2.0;
    min_distance = 0.62 * std::sqrt(lam * lam / 4.0);
}

void ScenarioConfig::set_num_layers(int layers, bool keep_total_thickness)
{
    if (layers < 1)
        throw std::invalid_argument("num_layers must be >= 1");
    double total = 0.0;
    for (double g : nominal_gaps)
        total += g;
    const double fill = nominal_gaps.empty() ? 6.0 * wavelength() : nominal_gaps.back();
    num_layers = layers;
    if (keep_total_thickness && total > 0.0)
        nominal_gaps.assign(static_cast<size_t>(layers), total / layers);
    else
        nominal_gaps.resize(static_cast<size_t>(layers), fill);
}

void ScenarioConfig::set_atoms_per_layer(int atoms)
{
    if (atoms < 1)
        throw std::invalid_argument("atoms_per_layer must be >= 1");
    int nx = 1;
    for (int d = 1; d * d <= atoms; ++d)
        if (atoms % d == 0)
            nx = d;
    atoms_per_layer = atoms;
    atoms_per_row = nx;
}

void ScenarioConfig::set_num_users(int users)
{
    if (users < 1)
        throw std::invalid_argument("num_users must be >= 1");
    const double fill = noise_vars.empty() ? dbm_to_watt(-104.0) : noise_vars.back();
    num_users = users;
    noise_vars.resize(static_cast<size_t>(users), fill);
}

void ScenarioConfig::validate() const
{
    auto fail = [](const std::string &msg) { throw std::invalid_argument("invalid config: " + msg); };
    if (num_tx_antennas < 1 || num_layers < 1 || atoms_per_layer < 1 || num_users < 1)
        fail("counts must be positive");
    if (atoms_per_row < 1 || atoms_per_layer % atoms_per_row != 0)
        fail("atoms_per_row must divide atoms_per_layer");
    if (!(carrier_freq > 0.0))
        fail("carrier frequency must be positive");
    if (!(min_distance > 0.0))
        fail("min_distance must be positive");
    if (!(morph_range >= 0.0))
        fail("morph_range must be non-negative");
    if (!(power_budget > 0.0))
        fail("power budget must be positive");
    if (static_cast<int>(noise_vars.size()) != num_users)
        fail("one noise variance per user required");
    for (double s : noise_vars)
        if (!(s > 0.0))
            fail("noise variances must be positive");
    if (static_cast<int>(nominal_gaps.size()) != num_layers)
        fail("one nominal gap per layer required");
    for (double g : nominal_gaps)
        if (!(g > 0.0))
            fail("nominal gaps must be positive");
    if (!(antenna_area > 0.0) || !(atom_area > 0.0))
        fail("areas must be positive");
    if (num_paths < 1)
        fail("num_paths must be >= 1");
    if (quant_bits < 1 || quant_bits > 16)
        fail("quant_bits must lie in [1, 16]");
    if (!(rate_threshold_factor >= 0.0))
        fail("rate_threshold_factor must be non-negative");
}

namespace
{

// 53-bit uniform in [0, 1) from the raw generator output, identical on every
// platform (std::uniform_real_distribution is not).
double uniform01(std::mt19937_64 &gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

double uniform(std::mt19937_64 &gen, double a, double b) { return a + (b - a) * uniform01(gen); }

} // namespace

UserGeometry sample_scenario(const ScenarioConfig &cfg, std::uint64_t seed)
{
    cfg.validate();
    std::mt19937_64 gen(seed);
    const double lam = cfg.wavelength();
    const double nlos_scale = std::sqrt(0.1); // -10 dB

    UserGeometry g;
    g.paths.resize(static_cast<size_t>(cfg.num_users));
    for (auto &user : g.paths)
    {
        user.resize(static_cast<size_t>(cfg.num_paths));
        for (int i = 0; i < cfg.num_paths; ++i)
        {
            PathGeometry &p = user[static_cast<size_t>(i)];
            double chi = 0.0;
            if (i == 0)
            {
                p.distance = uniform(gen, 95.0, 105.0);
                p.azimuth = uniform(gen, -kPi / 4.0, kPi / 4.0);
                p.elevation = uniform(gen, -kPi / 4.0, kPi / 4.0);
            }
            else
            {
                p.distance = uniform(gen, 55.0, 105.0);
                p.azimuth = uniform(gen, -kPi / 2.0, -kPi / 4.0);
                p.elevation = uniform(gen, -kPi / 2.0, -kPi / 4.0);
                chi = uniform(gen, 0.0, 2.0 * kPi);
            }
            double amp = lam / (4.0 * kPi * p.distance);
            if (i > 0)
                amp *= nlos_scale;
            p.gain = std::polar(amp, chi);
        }
    }
    return g;
}

} // namespace flexsim
