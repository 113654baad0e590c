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

struct RateReport
{
    Eigen::MatrixXd power; // J(k, i) = |g_k^T w_i|^2
    Eigen::VectorXd sinr;
    Eigen::VectorXd rate; // bits/s/Hz
    double sum_rate = 0.0;

    int num_users() const { return static_cast<int>(rate.size()); }
};

// G holds the cascaded channels as rows (K x M).
RateReport sinr_and_rates(const Eigen::MatrixXcd &G, const Precoder &W, const std::vector<double> &noise);

// Same from precomputed inner products s(k, i) = g_k^T w_i.
RateReport rates_from_products(const Eigen::MatrixXcd &s, const std::vector<double> &noise);

// Rate shortfall [bits/s/Hz] still counted as meeting a threshold.
inline constexpr double kQosTol = 1e-6;

// Shortfall the optimizers themselves accept. Half of kQosTol, so a point the
// optimizers keep still passes kQosTol after the rates are recomputed along a
// different arithmetic path.
inline constexpr double kQosAcceptTol = 0.5 * kQosTol;

// threshold_k - R_k <= tol for every user (the form qos_violations uses).
bool meets_qos(const RateReport &report, const Eigen::VectorXd &thresholds, double tol = kQosTol);

// max(0, threshold_k - R_k)
Eigen::VectorXd qos_violations(const RateReport &report, const Eigen::VectorXd &thresholds);

// sum_k (threshold_k - R_k + slack_k)^2
double penalty_term(const RateReport &report, const Eigen::VectorXd &thresholds, const Eigen::VectorXd &slack);

// R_sum - penalty / (2 omega)
double augmented_objective(const RateReport &report, const Eigen::VectorXd &thresholds, const Eigen::VectorXd &slack,
                           double omega);

} // namespace flexsim
