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

#include "flexsim/bf_opt.hpp"

#include "flexsim/metrics.hpp"

#include <cmath>

namespace flexsim
{

BfRoundResult bf_sca_round(const Precoder &W_prev, const Eigen::MatrixXcd &G, const std::vector<double> &noise,
                           const Eigen::VectorXd &thresholds, double power_budget, const BfParams &params)
{
    const int K = static_cast<int>(G.rows());
    const int M = static_cast<int>(G.cols());
    const double scale = std::sqrt(power_budget);

    RateScaProblem p;
    p.K = K;
    p.region = RateScaProblem::Region::Ball;
    p.radius2 = 1.0;
    p.x0.resize(M * K);
    for (int i = 0; i < K; ++i)
        p.x0.segment(i * M, M) = W_prev.col(i) / scale;
    p.coeff.resize(static_cast<size_t>(K) * K);
    for (int k = 0; k < K; ++k)
    {
        const Eigen::VectorXcd gk = G.row(k).transpose() * (scale / std::sqrt(noise[k]));
        for (int i = 0; i < K; ++i)
        {
            Eigen::VectorXcd c = Eigen::VectorXcd::Zero(M * K);
            c.segment(i * M, M) = gk;
            p.coeff[k * K + i] = std::move(c);
        }
    }
    p.qos.resize(K);
    for (int k = 0; k < K; ++k)
        p.qos[k] = thresholds.size() == K ? std::exp2(thresholds[k]) - 1.0 : 0.0;

    const RateScaSolution sol = solve_rate_sca(p, params.solver);

    BfRoundResult out;
    out.gap = sol.gap;
    Precoder W(M, K);
    for (int i = 0; i < K; ++i)
        W.col(i) = sol.x.segment(i * M, M) * scale;

    const RateReport before = sinr_and_rates(G, W_prev, noise);
    const RateReport after = sinr_and_rates(G, W, noise);
    const bool was_ok = meets_qos(before, thresholds, kQosAcceptTol);
    const bool now_ok = meets_qos(after, thresholds, kQosAcceptTol);
    const bool power_ok = W.squaredNorm() <= power_budget * (1.0 + 1e-12);
    const bool better = after.sum_rate >= before.sum_rate - 1e-12;

    if (sol.qos_feasible && power_ok && now_ok && (better || !was_ok))
    {
        out.W = W;
        out.sum_rate = after.sum_rate;
    }
    else
    {
        out.W = W_prev;
        out.sum_rate = before.sum_rate;
        out.stalled = true;
    }
    return out;
}

BfRunResult run_bf_opt(const Precoder &W0, const Eigen::MatrixXcd &G, const std::vector<double> &noise,
                       const Eigen::VectorXd &thresholds, double power_budget, const BfParams &params)
{
    BfRunResult res;
    res.W = W0;
    res.sum_rate_trace.push_back(sinr_and_rates(G, W0, noise).sum_rate);
    for (int round = 0; round < params.max_rounds; ++round)
    {
        const BfRoundResult r = bf_sca_round(res.W, G, noise, thresholds, power_budget, params);
        ++res.rounds;
        res.W = r.W;
        res.sum_rate_trace.push_back(r.sum_rate);
        if (r.stalled)
        {
            res.stalled = true;
            break;
        }
        const size_t n = res.sum_rate_trace.size();
        if (std::abs(res.sum_rate_trace[n - 1] - res.sum_rate_trace[n - 2]) <= params.rate_tol)
            break;
    }
    return res;
}

} // namespace flexsim
