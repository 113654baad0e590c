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

#include "flexsim/config_io.hpp"

#include <yaml-cpp/yaml.h>

#include <stdexcept>

namespace flexsim
{

namespace
{

template <typename T>
bool read(const YAML::Node &sec, const char *key, T &out)
{
    if (!sec || !sec[key])
        return false;
    out = sec[key].as<T>();
    return true;
}

// Scalar or per-entry list.
bool read_list(const YAML::Node &sec, const char *key, std::vector<double> &out, size_t size, double scale)
{
    if (!sec || !sec[key])
        return false;
    const YAML::Node n = sec[key];
    if (n.IsSequence())
    {
        if (n.size() != size)
            throw std::invalid_argument(std::string("config: ") + key + " needs " + std::to_string(size) + " entries");
        for (size_t i = 0; i < size; ++i)
            out[i] = n[i].as<double>() * scale;
    }
    else
        out.assign(size, n.as<double>() * scale);
    return true;
}

void apply(const YAML::Node &root, ScenarioConfig &cfg, AlgorithmConfig &algo)
{
    if (!root || root.IsNull())
        return;
    if (!root.IsMap())
        throw std::invalid_argument("config: top level must be a mapping");

    if (const YAML::Node c = root["carrier"])
    {
        double f = cfg.carrier_freq;
        if (read(c, "frequency_hz", f) && f != cfg.carrier_freq)
        {
            cfg.carrier_freq = f;
            cfg.rescale_to_wavelength();
        }
    }

    if (const YAML::Node s = root["system"])
    {
        int v = 0;
        if (read(s, "antennas", v))
            cfg.num_tx_antennas = v;
        if (read(s, "layers", v))
            cfg.set_num_layers(v, false);
        if (read(s, "atoms_per_layer", v))
            cfg.set_atoms_per_layer(v);
        if (read(s, "atoms_per_row", v))
            cfg.atoms_per_row = v;
        if (read(s, "users", v))
            cfg.set_num_users(v);
    }

    const double lam = cfg.wavelength();
    if (const YAML::Node g = root["geometry"])
    {
        double v = 0.0;
        if (read(g, "antenna_area", v))
            cfg.antenna_area = v * lam * lam;
        if (read(g, "atom_area", v))
            cfg.atom_area = v * lam * lam;
        if (read(g, "antenna_spacing", v))
            cfg.antenna_spacing = v * lam;
        if (read(g, "atom_spacing_x", v))
            cfg.atom_spacing_x = v * lam;
        if (read(g, "atom_spacing_z", v))
            cfg.atom_spacing_z = v * lam;
        if (read(g, "x_offset", v))
            cfg.x_offset = v * lam;
        if (read(g, "z_offset", v))
            cfg.z_offset = v * lam;
        if (read(g, "morph_range", v))
            cfg.morph_range = v * lam;
        if (read(g, "min_distance", v))
            cfg.min_distance = v * lam;
        read_list(g, "nominal_gap", cfg.nominal_gaps, static_cast<size_t>(cfg.num_layers), lam);
    }

    if (const YAML::Node p = root["power"])
    {
        double v = 0.0;
        if (read(p, "budget_dbm", v))
            cfg.power_budget = dbm_to_watt(v);
        std::vector<double> noise = cfg.noise_vars;
        if (read_list(p, "noise_dbm", noise, static_cast<size_t>(cfg.num_users), 1.0))
        {
            for (auto &n : noise)
                n = dbm_to_watt(n);
            cfg.noise_vars = noise;
        }
    }

    if (const YAML::Node c = root["channel"])
    {
        read(c, "paths", cfg.num_paths);
        read(c, "seed", cfg.rng_seed);
    }

    if (const YAML::Node ph = root["phases"])
    {
        read(ph, "quant_bits", cfg.quant_bits);
        read(ph, "rate_threshold_factor", cfg.rate_threshold_factor);
    }

    if (const YAML::Node a = root["algorithm"])
    {
        read(a, "tol", algo.ao.tol);
        read(a, "max_outer", algo.ao.max_outer);
        read(a, "timing", algo.ao.timing);
        read(a, "morph_initial_move", algo.morph.initial_move);
        read(a, "morph_max_halvings", algo.morph.max_halvings);
        read(a, "morph_sufficient_increase", algo.morph.sufficient_increase);
        read(a, "omega_init", algo.morph.omega_init);
        read(a, "kappa", algo.morph.kappa);
        read(a, "omega_floor", algo.morph.omega_floor);
        read(a, "qos_tol", algo.morph.qos_tol);
        read(a, "max_retries", algo.morph.max_retries);
        read(a, "bf_max_rounds", algo.bf.max_rounds);
        read(a, "bf_rate_tol", algo.bf.rate_tol);
        read(a, "phase_max_passes", algo.phase.max_passes);
        read(a, "sca_rounds", algo.phase.sca_rounds);
        read(a, "sca_tol", algo.phase.sca_tol);
        read(a, "polish", algo.phase.polish);
        read(a, "polish_passes", algo.phase.polish_passes);
        read(a, "polish_grid", algo.phase.polish_grid);
    }
    cfg.validate();
}

} // namespace

void load_config_string(const std::string &text, ScenarioConfig &cfg, AlgorithmConfig &algo)
{
    apply(YAML::Load(text), cfg, algo);
}

void load_config_file(const std::string &path, ScenarioConfig &cfg, AlgorithmConfig &algo)
{
    apply(YAML::LoadFile(path), cfg, algo);
}

} // namespace flexsim
