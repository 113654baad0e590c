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

#include "flexsim/problem.hpp"

#include <Eigen/Dense>

#include <vector>

namespace flexsim
{

struct MorphParams
{
    // First trial step moves the largest coordinate by this many wavelengths;
    // the step is then halved until sufficient increase holds.
    double initial_move = 0.05;
    int max_halvings = 60;
    double sufficient_increase = 1e-4; // epsilon in R_aug(y_t) >= R_aug(y_{t-1}) + eps ||dy||^2
    double omega_init = 1.0;
    double kappa = 0.5;
    double omega_floor = 1e-6;
    double qos_tol = kQosAcceptTol;
    int max_retries = 20;
};

struct MorphOptState
{
    MorphState morph;
    Eigen::VectorXd slack; // mu_k
    double omega = 1.0;
    int iterations = 0;
    bool stalled = false;
    bool qos_warning = false;
    double last_step = 0.0; // largest coordinate move of the accepted step [m]

    static MorphOptState initial(const MorphState &morph, int num_users, const MorphParams &params);
};

struct MorphTraceRow
{
    int iteration;
    double sum_rate;
    double aug;
    double omega;
    double max_violation;
    double step;
};

// One projected gradient ascent step on R_aug with backtracking, followed by
// the slack update mu_k = max(0, R_k - R_k^th).
MorphOptState morph_step(const MorphOptState &state, const Problem &problem, const PhaseStack &phases,
                         const Precoder &W, const MorphParams &params);

// Tightens the penalty (omega <- kappa omega, floored) while a QoS violation
// persists. Sets qos_warning once omega sits at the floor.
MorphOptState penalty_schedule(const MorphOptState &state, const RateReport &report, const Eigen::VectorXd &thresholds,
                               const MorphParams &params);

// The full morphing update: step, penalty retries, and a guard that keeps the
// incoming point unless the candidate satisfies every QoS constraint and does
// not lower the sum rate.
MorphOptState run_morph_update(const MorphOptState &state, const Problem &problem, const PhaseStack &phases,
                               const Precoder &W, const MorphParams &params,
                               std::vector<MorphTraceRow> *trace = nullptr);

} // namespace flexsim
