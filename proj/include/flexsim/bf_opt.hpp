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

#include "flexsim/rate_sca.hpp"
#include "flexsim/scenario.hpp"

#include <Eigen/Dense>

#include <vector>

namespace flexsim
{

struct BfParams
{
    int max_rounds = 20;
    double rate_tol = 1e-4;
    RateScaOptions solver;
};

struct BfRoundResult
{
    Precoder W;
    double sum_rate = 0.0;
    bool stalled = false; // W_prev returned
    double gap = 0.0;
};

// One convex subproblem around W_prev. G holds the cascaded channels as rows.
BfRoundResult bf_sca_round(const Precoder &W_prev, const Eigen::MatrixXcd &G, const std::vector<double> &noise,
                           const Eigen::VectorXd &thresholds, double power_budget, const BfParams &params = {});

struct BfRunResult
{
    Precoder W;
    int rounds = 0;
    bool stalled = false;
    std::vector<double> sum_rate_trace; // entry 0 is the input
};

BfRunResult run_bf_opt(const Precoder &W0, const Eigen::MatrixXcd &G, const std::vector<double> &noise,
                       const Eigen::VectorXd &thresholds, double power_budget, const BfParams &params = {});

} // namespace flexsim
