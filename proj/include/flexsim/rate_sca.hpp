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

#include "flexsim/scenario.hpp"

#include <Eigen/Dense>

#include <vector>

namespace flexsim
{

// Convex surrogate shared by the precoder and the continuous phase update.
//
// The decision variable x is complex of length n. Every inner product the
// rate depends on is linear in x:  s_ki(x) = coeff[k * K + i]^T x, already
// divided by the noise standard deviation so that the noise power is 1.
//
// The solver maximizes the standard SCA lower bound of sum_k R_k around x0
//   sum_k log2(1 + sum_i tau_ki) - log2(S_k) - (sum_{i != k} varpi_ki + 1 - S_k) / (S_k ln 2)
// subject to
//   varpi_ki >= |s_ki(x)|^2                      (i != k)
//   tau_ki   <= 2 Re{conj(s_ki(x0)) s_ki(x)} - |s_ki(x0)|^2
//   tau_kk   >= c_k (sum_{i != k} varpi_ki + 1)  (QoS, c_k = 2^{R_k^th} - 1)
//   ||x||^2 <= radius2          (Region::Ball)
//   |x_j|^2 <= 1 for every j    (Region::UnitDisc)
// with S_k = sum_{i != k} |s_ki(x0)|^2 + 1. The bound is tight at x0.
//
// Both slack families sit at their bounds at any optimum (the objective is
// increasing in tau and decreasing in varpi, and so is the QoS margin), so
// they are eliminated and the barrier method runs over x alone.
struct RateScaProblem
{
    enum class Region
    {
        Ball,
        UnitDisc
    };

    int K = 0;
    std::vector<Eigen::VectorXcd> coeff;
    Eigen::VectorXcd x0;
    Eigen::VectorXd qos; // c_k; zero disables
    Region region = Region::Ball;
    double radius2 = 1.0;
};

struct RateScaOptions
{
    double gap_tol = 1e-8;   // stop when (#constraints)/t falls below
    double t0 = 1.0;
    double t_growth = 10.0;
    int max_newton = 60;     // per centering step
    double newton_tol = 1e-10;
};

struct RateScaSolution
{
    Eigen::VectorXcd x;
    double surrogate = 0.0;    // surrogate value at x
    double surrogate_x0 = 0.0; // surrogate value at x0 (equals the true rate sum)
    double gap = 0.0;          // final duality measure
    int newton_steps = 0;
    bool qos_feasible = true;  // false when phase I could not reach the QoS set
    bool converged = false;
};

// Sum of log2(1 + SINR_k) for x given the normalized coefficients.
double true_rate_sum(const RateScaProblem &p, const Eigen::VectorXcd &x);
Eigen::VectorXd true_rates(const RateScaProblem &p, const Eigen::VectorXcd &x);

// Surrogate value at x with the slack variables at their optimal values.
double surrogate_value(const RateScaProblem &p, const Eigen::VectorXcd &x);

RateScaSolution solve_rate_sca(const RateScaProblem &p, const RateScaOptions &opt = {});

} // namespace flexsim
