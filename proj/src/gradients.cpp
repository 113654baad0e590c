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

#include "flexsim/gradients.hpp"

#include <cmath>
#include <stdexcept>

namespace flexsim
{

GradWorkspace make_workspace(const ChannelStack &stack, const PhaseStack &phases, const Precoder &W)
{
    const int L = static_cast<int>(stack.omega.size());
    const int N = static_cast<int>(stack.omega[0].rows());
    const int K = static_cast<int>(stack.user.size());
    if (W.cols() != K || W.rows() != stack.omega[0].cols())
        throw std::invalid_argument("precoder dimensions disagree with the channel stack");

    GradWorkspace ws;
    ws.prefix.assign(L, std::vector<Eigen::VectorXcd>(K));
    ws.suffix.assign(L + 1, std::vector<Eigen::VectorXcd>(K));

    for (int k = 0; k < K; ++k)
    {
        ws.prefix[L - 1][k] = phases.layer(L - 1, N).cwiseProduct(stack.user[k]);
        for (int l = L - 2; l >= 0; --l)
            ws.prefix[l][k] = phases.layer(l, N).cwiseProduct(stack.omega[l + 1].transpose() * ws.prefix[l + 1][k]);
    }
    for (int i = 0; i < K; ++i)
    {
        ws.suffix[0][i] = W.col(i);
        for (int l = 0; l < L; ++l)
            ws.suffix[l + 1][i] = phases.layer(l, N).cwiseProduct(stack.omega[l] * ws.suffix[l][i]);
    }

    ws.products.resize(K, K);
    for (int k = 0; k < K; ++k)
        for (int i = 0; i < K; ++i)
            ws.products(k, i) = stack.user[k].transpose() * ws.suffix[L][i];
    return ws;
}

void compute_product_derivatives(GradWorkspace &ws, const ChannelStack &stack)
{
    if (stack.omega_dgap.size() != stack.omega.size() || stack.user_dy.size() != stack.user.size())
        throw std::invalid_argument("channel stack was built without derivatives");
    const int L = static_cast<int>(stack.omega.size());
    const int N = static_cast<int>(stack.omega[0].rows());
    const int K = ws.K();

    // Row terms (D_l b_i) and column terms (D_{l+1}^T a_k), shared across pairs.
    std::vector<std::vector<Eigen::VectorXcd>> row_term(L, std::vector<Eigen::VectorXcd>(K));
    std::vector<std::vector<Eigen::VectorXcd>> col_term(L, std::vector<Eigen::VectorXcd>(K));
    for (int l = 0; l < L; ++l)
        for (int j = 0; j < K; ++j)
        {
            row_term[l][j] = stack.omega_dgap[l] * ws.suffix[l][j];
            if (l + 1 < L)
                col_term[l][j] = stack.omega_dgap[l + 1].transpose() * ws.prefix[l + 1][j];
        }

    ws.d_products.assign(static_cast<size_t>(K) * K, Eigen::VectorXcd());
    for (int k = 0; k < K; ++k)
        for (int i = 0; i < K; ++i)
        {
            Eigen::VectorXcd d(N * L);
            for (int l = 0; l < L; ++l)
            {
                auto seg = d.segment(l * N, N);
                seg = ws.prefix[l][k].cwiseProduct(row_term[l][i]);
                if (l + 1 < L)
                    seg -= col_term[l][k].cwiseProduct(ws.suffix[l + 1][i]);
                else
                    seg += stack.user_dy[k].cwiseProduct(ws.suffix[L][i]);
            }
            ws.d_products[static_cast<size_t>(k) * K + i] = std::move(d);
        }
}

Eigen::VectorXd grad_J(const GradWorkspace &ws, int k, int i)
{
    const auto &ds = ws.d_products.at(static_cast<size_t>(k) * ws.K() + i);
    return 2.0 * (std::conj(ws.products(k, i)) * ds).real();
}

std::vector<Eigen::VectorXd> grad_rates(const GradWorkspace &ws, const std::vector<double> &noise)
{
    const int K = ws.K();
    const Eigen::Index n = ws.d_products.at(0).size();
    const double inv_ln2 = 1.0 / std::log(2.0);
    std::vector<Eigen::VectorXd> out(K);
    for (int k = 0; k < K; ++k)
    {
        double total = noise[k];
        for (int i = 0; i < K; ++i)
            total += std::norm(ws.products(k, i));
        const double interf = total - std::norm(ws.products(k, k));

        Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < K; ++i)
        {
            const Eigen::VectorXd gj = grad_J(ws, k, i);
            g += gj / total;
            if (i != k)
                g -= gj / interf;
        }
        out[k] = inv_ln2 * g;
    }
    return out;
}

Eigen::VectorXd grad_sum_rate(const GradWorkspace &ws, const std::vector<double> &noise)
{
    const auto gr = grad_rates(ws, noise);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(gr.at(0).size());
    for (const auto &v : gr)
        g += v;
    return g;
}

Eigen::VectorXd grad_aug(const GradWorkspace &ws, const RateReport &report, const std::vector<double> &noise,
                         const Eigen::VectorXd &thresholds, const Eigen::VectorXd &slack, double omega)
{
    const auto gr = grad_rates(ws, noise);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(gr.at(0).size());
    for (int k = 0; k < ws.K(); ++k)
        g += (1.0 + (thresholds[k] - report.rate[k] + slack[k]) / omega) * gr[k];
    return g;
}

Eigen::VectorXd fd_oracle(const std::function<double(const Eigen::VectorXd &)> &f, const Eigen::VectorXd &y0,
                          double h)
{
    if (!(h > 0.0))
        throw std::invalid_argument("finite-difference step must be positive");
    Eigen::VectorXd g(y0.size());
    Eigen::VectorXd y = y0;
    for (Eigen::Index i = 0; i < y0.size(); ++i)
    {
        y[i] = y0[i] + h;
        const double fp = f(y);
        y[i] = y0[i] - h;
        const double fm = f(y);
        y[i] = y0[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

} // namespace flexsim
