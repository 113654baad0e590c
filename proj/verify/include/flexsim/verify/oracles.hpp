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

// Independent reference implementations used only by the test suites.

#include "flexsim/channel.hpp"
#include "flexsim/geometry.hpp"
#include "flexsim/phase_opt.hpp"
#include "flexsim/scenario.hpp"

#include <Eigen/Dense>

#include <vector>

namespace flexsim::verify
{

// Propagation coefficient evaluated from raw coordinates with std::exp.
cdouble rs_entry_naive(double area, const Point3 &rx, const Point3 &tx, double wavelength);

// Coordinates from the configuration alone (no Layout).
Point3 atom_position_naive(const ScenarioConfig &cfg, int layer, int atom, const Eigen::VectorXd &y);
Point3 antenna_position_naive(const ScenarioConfig &cfg, int m);

// Full cascade by explicit loops over every path through the stack:
// g_k[m] = sum over (n_L, ..., n_1) of h_k[n_L] phi ... Omega_1[n_1, m].
// Exponential in L; keep instances tiny.
Eigen::MatrixXcd cascade_naive(const ScenarioConfig &cfg, const Eigen::VectorXd &y, const UserGeometry &geom,
                               const PhaseStack &phases);

// Dense steering-vector channel from the definition.
Eigen::VectorXcd user_channel_naive(const ScenarioConfig &cfg, int user, const Eigen::VectorXd &y,
                                    const UserGeometry &geom);

// min ||y - v||^2  s.t.  A y >= b, by enumerating every active set of at most
// dim rows on each connected block of variables and keeping the best KKT
// point. Throws when no KKT point exists.
Eigen::VectorXd brute_force_qp(const Eigen::VectorXd &v, const Eigen::MatrixXd &A, const Eigen::VectorXd &b);

// A and b of the box plus difference constraints in dense form.
void dense_constraints(const ConstraintSystem &cs, Eigen::MatrixXd &A, Eigen::VectorXd &b);

// Best sum rate over all U^N responses of one layer (with QoS).
struct ExhaustiveResult
{
    double sum_rate;
    std::vector<int> index;
};
ExhaustiveResult exhaustive_discrete(const LayerSurrogate &sur, const std::vector<cdouble> &alphabet,
                                     const Eigen::VectorXd &thresholds, const std::vector<double> &noise);

// log2(1 + P ||g||^2 / sigma^2).
double mrt_rate(const Eigen::VectorXcd &g, double power, double noise);

} // namespace flexsim::verify
