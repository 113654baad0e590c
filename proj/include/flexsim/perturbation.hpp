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
#include "flexsim/scenario.hpp"

#include <Eigen/Dense>

#include <stdexcept>
#include <vector>

namespace flexsim
{

// Single antenna, single user: P_r(y) = P_t |g(y)|^2.
struct PerturbReport
{
    double power0 = 0.0;        // P_r(0) [W]
    Eigen::VectorXd gradient;   // dP_r/dy at 0 [W/m]
    double morph_range = 0.0;
    double gain_sfim = 0.0;     // predicted
    double gain_dsim = 0.0;     // predicted
    Eigen::VectorXd y_sfim;
    Eigen::VectorXd y_dsim;
    double actual_sfim = 0.0;   // P_r(y_sfim) - P_r(0)
    double actual_dsim = 0.0;
};

struct ValidationRow
{
    double morph_range;
    double predicted;
    double actual;
    double rel_error; // |predicted - actual| / |actual|
    double gain_sfim;
    double gain_dsim;
    double actual_dsim;
};

// Received power at y for fixed responses and transmit power.
double received_power(const Layout &layout, const UserGeometry &geom, const PhaseStack &phases, double tx_power,
                      const Eigen::VectorXd &y);

// Sign with sign(0) = +1.
inline double sign_pos(double v) { return v < 0.0 ? -1.0 : 1.0; }

// Predicted gains from an already computed gradient (pure arithmetic).
void gains_from_gradient(const Eigen::VectorXd &grad, int num_layers, int atoms_per_layer, double morph_range,
                         double &gain_sfim, double &gain_dsim, Eigen::VectorXd *y_sfim = nullptr,
                         Eigen::VectorXd *y_dsim = nullptr);

// Throws std::invalid_argument unless M = K = 1.
PerturbReport perturb_gains(const ScenarioConfig &cfg, const UserGeometry &geom, const PhaseStack &phases,
                            double morph_range);

std::vector<ValidationRow> first_order_validate(const ScenarioConfig &cfg, const UserGeometry &geom,
                                                const PhaseStack &phases, const PerturbReport &report,
                                                const std::vector<double> &ranges);

} // namespace flexsim
