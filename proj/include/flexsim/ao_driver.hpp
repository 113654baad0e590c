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

#include "flexsim/bf_opt.hpp"
#include "flexsim/morph_opt.hpp"
#include "flexsim/phase_opt.hpp"
#include "flexsim/problem.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace flexsim
{

struct AoParams
{
    double tol = 1e-3;
    int max_outer = 100;
    bool timing = false; // fill wall_ms (otherwise 0 for reproducible output)
};

struct AlgorithmConfig
{
    AoParams ao;
    MorphParams morph;
    BfParams bf;
    PhaseParams phase;
};

struct AoTraceRow
{
    int iteration = 0;
    double sum_rate = 0.0;
    double aug = 0.0;
    Eigen::VectorXd rates;
    double max_violation = 0.0;
    double omega = 0.0;
    double max_abs_y = 0.0;
    double wall_ms = 0.0;
};

struct AoTrace
{
    std::vector<AoTraceRow> rows; // rows[0] is the initial point
    std::string termination;      // "converged" or "max_outer"
    int stalls = 0;
    bool qos_warning = false;

    int iterations() const { return rows.empty() ? 0 : static_cast<int>(rows.size()) - 1; }
    double final_sum_rate() const { return rows.empty() ? 0.0 : rows.back().sum_rate; }
};

struct AoResult
{
    SystemState state;
    AoTrace trace;
};

AoResult run_ao(const Problem &problem, const SystemState &init, Architecture mode, PhaseMode phase_mode,
                const AlgorithmConfig &algo = {});

// Builds the problem, sets thresholds from the zero-forcing start, runs.
AoResult run_ao(const ScenarioConfig &cfg, const UserGeometry &geom, Architecture mode, PhaseMode phase_mode,
                const AlgorithmConfig &algo = {});

} // namespace flexsim
