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

#include "flexsim/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace flexsim
{

RateReport rates_from_products(const Eigen::MatrixXcd &s, const std::vector<double> &noise)
{
    const int K = static_cast<int>(s.rows());
    if (static_cast<int>(noise.size()) != K)
        throw std::invalid_argument("one noise variance per user required");

    RateReport r;
    r.power = s.cwiseAbs2();
    r.sinr.resize(K);
    r.rate.resize(K);
    for (int k = 0; k < K; ++k)
    {
        const double interference = r.power.row(k).sum() - r.power(k, k);
        r.sinr[k] = r.power(k, k) / (interference + noise[k]);
        r.rate[k] = std::log2(1.0 + r.sinr[k]);
    }
    r.sum_rate = r.rate.sum();
    return r;
}

RateReport sinr_and_rates(const Eigen::MatrixXcd &G, const Precoder &W, const std::vector<double> &noise)
{
    if (G.cols() != W.rows() || G.rows() != W.cols())
        throw std::invalid_argument("channel and precoder dimensions disagree");
    return rates_from_products(G * W, noise);
}

Eigen::VectorXd qos_violations(const RateReport &report, const Eigen::VectorXd &thresholds)
{
    return (thresholds - report.rate).cwiseMax(0.0);
}

double penalty_term(const RateReport &report, const Eigen::VectorXd &thresholds, const Eigen::VectorXd &slack)
{
    return (thresholds - report.rate + slack).squaredNorm();
}

double augmented_objective(const RateReport &report, const Eigen::VectorXd &thresholds, const Eigen::VectorXd &slack,
                           double omega)
{
    return report.sum_rate - penalty_term(report, thresholds, slack) / (2.0 * omega);
}

bool meets_qos(const RateReport &report, const Eigen::VectorXd &thresholds, double tol)
{
    for (int k = 0; k < report.num_users(); ++k)
        if (thresholds.size() == report.num_users() && thresholds[k] - report.rate[k] > tol)
            return false;
    return true;
}

} // namespace flexsim
