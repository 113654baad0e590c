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

#include "flexsim/channel.hpp"
#include "flexsim/geometry.hpp"
#include "flexsim/metrics.hpp"
#include "flexsim/scenario.hpp"

#include <Eigen/Dense>

#include <vector>

namespace flexsim
{

// Everything that stays fixed while the optimizer runs.
struct Problem
{
    Layout layout;
    UserGeometry geometry;
    ConstraintSystem constraints;
    std::vector<double> noise;
    double power_budget = 0.0;
    Eigen::VectorXd thresholds; // R_k^th

    Problem(const ScenarioConfig &cfg, UserGeometry geom);

    const ScenarioConfig &config() const { return layout.config(); }
};

struct SystemState
{
    MorphState morph;
    PhaseStack phases;
    Precoder W;
};

// Cascaded channel matrix and rates at a state.
Eigen::MatrixXcd cascaded_channel(const Problem &problem, const Eigen::VectorXd &y, const PhaseStack &phases);
RateReport evaluate(const Problem &problem, const SystemState &state);

// Zero-forcing on the rows of G with every column at power P_max / K.
// Throws DegenerateScenarioError when G G^H is singular.
Precoder zero_forcing(const Eigen::MatrixXcd &G, double power_budget);

// y = 0, phi = 1 (quantized when phase_mode is Discrete), zero-forcing W.
// Also fixes problem.thresholds to log2(1 + factor * sinr_k) at that point.
SystemState init_state(Problem &problem, Architecture mode, PhaseMode phase_mode);

struct FeasibilityReport
{
    double power_excess = 0.0;   // max(0, ||W||_F^2 - P_max) / P_max
    double qos_violation = 0.0;  // max_k (R_k^th - R_k)^+
    double morph_violation = 0.0; // box and minimum distance
    double mode_violation = 0.0;  // deviation from the architecture pattern
    double modulus_error = 0.0;   // max | |phi| - 1 |
    bool alphabet_ok = true;      // quantized entries lie in the alphabet

    // Direct check of the minimum distance on every element pair.
    double min_pair_distance = 0.0;
    double min_distance_required = 0.0;

    // QoS is judged against kQosTol, everything else against tol.
    bool ok(double tol = 1e-8) const;
};

FeasibilityReport check_feasibility(const Problem &problem, const SystemState &state);

} // namespace flexsim
