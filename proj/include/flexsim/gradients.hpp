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
#include "flexsim/metrics.hpp"

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace flexsim
{

// Prefix/suffix products of the cascade for one (y, phi, W) point.
//
//   prefix[l][k] = phi_l o (Omega_{l+1}^T prefix[l+1][k]),  prefix[L-1][k] = phi_{L-1} o h_k
//   suffix[l][i] = phi_{l-1} o (Omega_{l-1} suffix[l-1][i]),  suffix[0][i] = w_i
//
// so that g_k^T w_i = prefix[l][k]^T Omega_l suffix[l][i] for every split l.
// suffix has L + 1 entries; suffix[L][i] is the field leaving the final layer.
struct GradWorkspace
{
    std::vector<std::vector<Eigen::VectorXcd>> prefix;
    std::vector<std::vector<Eigen::VectorXcd>> suffix;
    Eigen::MatrixXcd products; // s(k, i) = g_k^T w_i

    // ds(k, i) stacked over y, filled by compute_product_derivatives.
    std::vector<Eigen::VectorXcd> d_products;

    int K() const { return static_cast<int>(products.rows()); }
};

// Requires stack built with derivatives.
GradWorkspace make_workspace(const ChannelStack &stack, const PhaseStack &phases, const Precoder &W);

// Fills ws.d_products with d(g_k^T w_i)/dy for every (k, i).
void compute_product_derivatives(GradWorkspace &ws, const ChannelStack &stack);

// Gradient of J(k, i) = |g_k^T w_i|^2 w.r.t. y [W/m].
Eigen::VectorXd grad_J(const GradWorkspace &ws, int k, int i);

// Gradient of R_k for every user [bits/s/Hz per m].
std::vector<Eigen::VectorXd> grad_rates(const GradWorkspace &ws, const std::vector<double> &noise);

Eigen::VectorXd grad_sum_rate(const GradWorkspace &ws, const std::vector<double> &noise);

Eigen::VectorXd grad_aug(const GradWorkspace &ws, const RateReport &report, const std::vector<double> &noise,
                         const Eigen::VectorXd &thresholds, const Eigen::VectorXd &slack, double omega);

// Central differences (f(y + h e_i) - f(y - h e_i)) / 2h.
Eigen::VectorXd fd_oracle(const std::function<double(const Eigen::VectorXd &)> &f, const Eigen::VectorXd &y0,
                          double h);

} // namespace flexsim
