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
#include "flexsim/rate_sca.hpp"
#include "flexsim/scenario.hpp"

#include <Eigen/Dense>

#include <vector>

namespace flexsim
{

// The cascade split at one layer:  g_k^T w_i = sum_n g_eff[k][n] phi[n] w_eff[i][n].
struct LayerSurrogate
{
    int layer = 0;
    std::vector<Eigen::VectorXcd> g_eff; // per user, length N
    std::vector<Eigen::VectorXcd> w_eff; // per precoder column, length N
    Eigen::VectorXcd phi;                // current responses of the layer

    int K() const { return static_cast<int>(g_eff.size()); }
    int N() const { return static_cast<int>(phi.size()); }

    // s(k, i) for an arbitrary response vector of this layer.
    Eigen::MatrixXcd products(const Eigen::VectorXcd &phi_layer) const;
    Eigen::MatrixXcd products() const { return products(phi); }
};

LayerSurrogate build_layer_surrogate(int layer, const ChannelStack &stack, const PhaseStack &phases, const Precoder &W);

// One-hot encoding of a quantized layer: phi = B q with unit row sums.
struct SelectionMatrix
{
    Eigen::MatrixXi B; // N x U
    Eigen::VectorXcd q;

    static SelectionMatrix from_indices(const std::vector<int> &index, const std::vector<cdouble> &alphabet);
    Eigen::VectorXcd phi() const;
    bool rows_valid() const;
};

struct PhaseParams
{
    int max_passes = 10;        // discrete coordinate sweeps
    int sca_rounds = 10;        // continuous SCA rounds per layer call
    double sca_tol = 1e-6;      // stop SCA rounds when the rate gain falls below
    bool polish = true;         // per-atom continuous coordinate refinement
    int polish_passes = 3;
    int polish_grid = 16;
    RateScaOptions solver{1e-6, 1.0, 50.0, 60, 1e-9};
};

struct DiscreteResult
{
    std::vector<int> index;
    int passes = 0;
    int changes = 0;
};

// Cyclic exhaustive coordinate descent on the true sum rate of the layer.
// start_index must hold the alphabet indices of the current responses.
DiscreteResult optimize_layer_discrete(const LayerSurrogate &sur, const std::vector<int> &start_index,
                                       const std::vector<cdouble> &alphabet, const Eigen::VectorXd &thresholds,
                                       const std::vector<double> &noise, const PhaseParams &params = {});

struct ContinuousResult
{
    Eigen::VectorXcd phi;
    int rounds = 0;
    int accepted = 0;
};

ContinuousResult optimize_layer_continuous(const LayerSurrogate &sur, const Eigen::VectorXd &thresholds,
                                           const std::vector<double> &noise, const PhaseParams &params = {});

// Helpers on the layer-restricted problem.
Eigen::VectorXd layer_rates(const LayerSurrogate &sur, const Eigen::VectorXcd &phi_layer,
                            const std::vector<double> &noise);

} // namespace flexsim
