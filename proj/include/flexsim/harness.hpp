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

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace flexsim
{

enum class SweepVariable
{
    MorphRange,     // values in wavelengths
    NumLayers,      // total thickness held fixed
    AtomsPerLayer,
    PowerBudgetDbm,
    QuantBits,
    Iterations      // caps the number of outer iterations
};

std::string_view to_string(SweepVariable v);
SweepVariable parse_sweep_variable(std::string_view s);

struct SweepSpec
{
    SweepVariable variable = SweepVariable::MorphRange;
    std::vector<double> values;
    std::vector<Architecture> modes;
    PhaseMode phase_mode = PhaseMode::Continuous;
    int realizations = 20;
    ScenarioConfig base = ScenarioConfig::defaults();
    AlgorithmConfig algo;
    std::uint64_t base_seed = 1;
    int threads = 1;

    void validate() const;
};

struct SweepRow
{
    std::string kind; // "run" or "summary"
    double value = 0.0;
    Architecture mode = Architecture::RSIM;
    PhaseMode phase_mode = PhaseMode::Continuous;
    int realization = -1; // -1 for summary rows
    double sum_rate = 0.0;
    double sum_rate_std = 0.0;
    int iterations = 0;
    double wall_ms = 0.0;
    std::string status; // "ok", "qos_warning", or an error message
};

// Seed of realization r. Every sweep value and mode sees the same channel
// draw for a given r.
std::uint64_t derive_seed(std::uint64_t base_seed, int realization);

// The configuration used for one sweep point.
ScenarioConfig apply_sweep_value(const ScenarioConfig &base, SweepVariable v, double value);

std::vector<SweepRow> run_sweep(const SweepSpec &spec);
void write_sweep_csv(std::ostream &os, const SweepSpec &spec, const std::vector<SweepRow> &rows);

struct ConvergenceRow
{
    Architecture mode;
    PhaseMode phase_mode;
    int iteration;
    double sum_rate;
};

struct ConvergenceSpec
{
    ScenarioConfig cfg = ScenarioConfig::defaults();
    AlgorithmConfig algo;
    std::vector<Architecture> modes;
    std::vector<PhaseMode> phase_modes;
    std::uint64_t seed = 1;
    int threads = 1;
};

// Also returns the final morphing vectors (one per mode/phase pair) when
// finals is non-null.
std::vector<ConvergenceRow> run_convergence(const ConvergenceSpec &spec, std::vector<AoResult> *finals = nullptr);
void write_convergence_csv(std::ostream &os, const std::vector<ConvergenceRow> &rows);

// layer,atom,x,z,y_hat per row for one final state.
void write_morph_csv(std::ostream &os, const ScenarioConfig &cfg, Architecture mode, PhaseMode phase_mode,
                     const Eigen::VectorXd &y);

struct PerturbSpec
{
    ScenarioConfig cfg; // M = K = 1
    std::vector<double> ranges; // in wavelengths
    int seeds = 20;
    std::uint64_t base_seed = 1;
};

struct PerturbRow
{
    std::uint64_t seed;
    double morph_range; // wavelengths
    double predicted;
    double actual;
    double rel_error;
    double gain_sfim;
    double gain_dsim;
    double actual_dsim;
};

// The reference single-antenna, single-user configuration with L = 4.
ScenarioConfig siso_config();

// Fixed responses used for the first-order analysis of one draw.
PhaseStack perturbation_phases(const ScenarioConfig &cfg, const UserGeometry &geom);

std::vector<PerturbRow> run_perturbation_sweep(const PerturbSpec &spec);
void write_perturbation_csv(std::ostream &os, const std::vector<PerturbRow> &rows);

inline constexpr const char *kCsvSchema = "# flexsim-csv v1";

} // namespace flexsim
