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

#include "flexsim/phase_opt.hpp"

#include "flexsim/gradients.hpp"
#include "flexsim/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace flexsim
{

Eigen::MatrixXcd LayerSurrogate::products(const Eigen::VectorXcd &phi_layer) const
{
    const int K = this->K();
    Eigen::MatrixXcd s(K, K);
    for (int k = 0; k < K; ++k)
    {
        const Eigen::VectorXcd gp = g_eff[k].cwiseProduct(phi_layer);
        for (int i = 0; i < K; ++i)
            s(k, i) = (gp.array() * w_eff[i].array()).sum();
    }
    return s;
}

LayerSurrogate build_layer_surrogate(int layer, const ChannelStack &stack, const PhaseStack &phases, const Precoder &W)
{
    const int L = static_cast<int>(stack.omega.size());
    if (layer < 0 || layer >= L)
        throw std::out_of_range("layer index out of range");
    const int N = static_cast<int>(stack.omega[0].rows());
    const GradWorkspace ws = make_workspace(stack, phases, W);
    const int K = ws.K();

    LayerSurrogate s;
    s.layer = layer;
    s.phi = phases.layer(layer, N);
    s.g_eff.resize(K);
    s.w_eff.resize(K);
    for (int k = 0; k < K; ++k)
    {
        s.g_eff[k] = layer == L - 1 ? stack.user[k] : Eigen::VectorXcd(stack.omega[layer + 1].transpose() * ws.prefix[layer + 1][k]);
        s.w_eff[k] = stack.omega[layer] * ws.suffix[layer][k];
    }
    return s;
}

SelectionMatrix SelectionMatrix::from_indices(const std::vector<int> &index, const std::vector<cdouble> &alphabet)
{
    SelectionMatrix s;
    const int U = static_cast<int>(alphabet.size());
    s.B = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(index.size()), U);
    s.q.resize(U);
    for (int u = 0; u < U; ++u)
        s.q[u] = alphabet[u];
    for (size_t n = 0; n < index.size(); ++n)
        s.B(static_cast<Eigen::Index>(n), index[n]) = 1;
    return s;
}

Eigen::VectorXcd SelectionMatrix::phi() const
{
    Eigen::VectorXcd out(B.rows());
    for (Eigen::Index n = 0; n < B.rows(); ++n)
    {
        cdouble v = 0.0;
        for (Eigen::Index u = 0; u < B.cols(); ++u)
            if (B(n, u))
                v += q[u];
        out[n] = v;
    }
    return out;
}

bool SelectionMatrix::rows_valid() const
{
    for (Eigen::Index n = 0; n < B.rows(); ++n)
    {
        int sum = 0;
        for (Eigen::Index u = 0; u < B.cols(); ++u)
        {
            if (B(n, u) != 0 && B(n, u) != 1)
                return false;
            sum += B(n, u);
        }
        if (sum != 1)
            return false;
    }
    return true;
}

Eigen::VectorXd layer_rates(const LayerSurrogate &sur, const Eigen::VectorXcd &phi_layer,
                            const std::vector<double> &noise)
{
    return rates_from_products(sur.products(phi_layer), noise).rate;
}

namespace
{

// Sum rate and QoS status straight from the product matrix.
struct Score
{
    double sum_rate;
    bool feasible;
};

Score score(const Eigen::MatrixXcd &s, const std::vector<double> &noise, const Eigen::VectorXd &thresholds)
{
    const int K = static_cast<int>(s.rows());
    Score sc{0.0, true};
    for (int k = 0; k < K; ++k)
    {
        double total = noise[k];
        for (int i = 0; i < K; ++i)
            total += std::norm(s(k, i));
        const double desired = std::norm(s(k, k));
        const double r = std::log2(total) - std::log2(total - desired);
        sc.sum_rate += r;
        if (thresholds.size() == K && thresholds[k] - r > kQosAcceptTol)
            sc.feasible = false;
    }
    return sc;
}

constexpr double kImprove = 1e-12;

} // namespace

DiscreteResult optimize_layer_discrete(const LayerSurrogate &sur, const std::vector<int> &start_index,
                                       const std::vector<cdouble> &alphabet, const Eigen::VectorXd &thresholds,
                                       const std::vector<double> &noise, const PhaseParams &params)
{
    const int N = sur.N();
    const int K = sur.K();
    const int U = static_cast<int>(alphabet.size());
    if (static_cast<int>(start_index.size()) != N)
        throw std::invalid_argument("index vector does not match the layer size");

    DiscreteResult res;
    res.index = start_index;
    Eigen::VectorXcd phi(N);
    for (int n = 0; n < N; ++n)
        phi[n] = alphabet[res.index[n]];

    for (int pass = 0; pass < params.max_passes; ++pass)
    {
        ++res.passes;
        Eigen::MatrixXcd s = sur.products(phi);
        int changed = 0;
        for (int n = 0; n < N; ++n)
        {
            Eigen::MatrixXcd c(K, K);
            for (int k = 0; k < K; ++k)
                for (int i = 0; i < K; ++i)
                    c(k, i) = sur.g_eff[k][n] * sur.w_eff[i][n];

            const Score cur = score(s, noise, thresholds);
            int best = res.index[n];
            double best_val = cur.feasible ? cur.sum_rate : -std::numeric_limits<double>::infinity();
            for (int u = 0; u < U; ++u)
            {
                if (u == res.index[n])
                    continue;
                const Score sc = score(s + c * (alphabet[u] - phi[n]), noise, thresholds);
                if (sc.feasible && sc.sum_rate > best_val + kImprove)
                {
                    best = u;
                    best_val = sc.sum_rate;
                }
            }
            if (best != res.index[n])
            {
                s += c * (alphabet[best] - phi[n]);
                phi[n] = alphabet[best];
                res.index[n] = best;
                ++changed;
            }
        }
        res.changes += changed;
        if (changed == 0)
            break;
    }
    return res;
}

namespace
{

Eigen::VectorXcd normalize_unit(const Eigen::VectorXcd &x, const Eigen::VectorXcd &fallback)
{
    Eigen::VectorXcd out(x.size());
    for (Eigen::Index j = 0; j < x.size(); ++j)
    {
        const double a = std::abs(x[j]);
        out[j] = a > 1e-12 ? x[j] / a : fallback[j];
    }
    return out;
}

// Per-atom continuous refinement: grid scan plus golden-section search on the
// phase of one atom at a time.
void polish(const LayerSurrogate &sur, Eigen::VectorXcd &phi, const Eigen::VectorXd &thresholds,
            const std::vector<double> &noise, const PhaseParams &params)
{
    const int N = sur.N();
    const int K = sur.K();
    const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int pass = 0; pass < params.polish_passes; ++pass)
    {
        Eigen::MatrixXcd s = sur.products(phi);
        bool any = false;
        for (int n = 0; n < N; ++n)
        {
            Eigen::MatrixXcd c(K, K);
            for (int k = 0; k < K; ++k)
                for (int i = 0; i < K; ++i)
                    c(k, i) = sur.g_eff[k][n] * sur.w_eff[i][n];
            const Eigen::MatrixXcd rest = s - c * phi[n];
            auto eval = [&](double th) { return score(rest + c * std::polar(1.0, th), noise, thresholds); };
            auto val = [&](double th) {
                const Score sc = eval(th);
                return sc.feasible ? sc.sum_rate : -std::numeric_limits<double>::infinity();
            };

            const double th0 = std::arg(phi[n]);
            const double v0 = val(th0);
            double best_th = th0, best_v = v0;
            const int G = params.polish_grid;
            for (int j = 0; j < G; ++j)
            {
                const double th = th0 + 2.0 * kPi * j / G;
                const double v = val(th);
                if (v > best_v)
                {
                    best_v = v;
                    best_th = th;
                }
            }
            double a = best_th - 2.0 * kPi / G, b = best_th + 2.0 * kPi / G;
            double x1 = b - golden * (b - a), x2 = a + golden * (b - a);
            double f1 = val(x1), f2 = val(x2);
            for (int it = 0; it < 40; ++it)
            {
                if (f1 < f2)
                {
                    a = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = a + golden * (b - a);
                    f2 = val(x2);
                }
                else
                {
                    b = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = b - golden * (b - a);
                    f1 = val(x1);
                }
            }
            const double th_g = f1 > f2 ? x1 : x2;
            const double v_g = std::max(f1, f2);
            if (v_g > best_v)
            {
                best_v = v_g;
                best_th = th_g;
            }
            if (best_v > v0 + kImprove)
            {
                phi[n] = std::polar(1.0, best_th);
                s = rest + c * phi[n];
                any = true;
            }
        }
        if (!any)
            break;
    }
}

} // namespace

ContinuousResult optimize_layer_continuous(const LayerSurrogate &sur, const Eigen::VectorXd &thresholds,
                                           const std::vector<double> &noise, const PhaseParams &params)
{
    const int N = sur.N();
    const int K = sur.K();

    ContinuousResult res;
    res.phi = normalize_unit(sur.phi, Eigen::VectorXcd::Ones(N));

    RateScaProblem p;
    p.K = K;
    p.region = RateScaProblem::Region::UnitDisc;
    p.coeff.resize(static_cast<size_t>(K) * K);
    for (int k = 0; k < K; ++k)
        for (int i = 0; i < K; ++i)
            p.coeff[k * K + i] = sur.g_eff[k].cwiseProduct(sur.w_eff[i]) / std::sqrt(noise[k]);
    p.qos.resize(K);
    for (int k = 0; k < K; ++k)
        p.qos[k] = thresholds.size() == K ? std::exp2(thresholds[k]) - 1.0 : 0.0;

    Score cur = score(sur.products(res.phi), noise, thresholds);
    for (int round = 0; round < params.sca_rounds; ++round)
    {
        ++res.rounds;
        p.x0 = res.phi;
        const RateScaSolution sol = solve_rate_sca(p, params.solver);
        if (!sol.qos_feasible)
            break;
        const Eigen::VectorXcd target = normalize_unit(sol.x, res.phi);

        bool accepted = false;
        double step = 1.0;
        for (int bt = 0; bt < 12 && !accepted; ++bt, step *= 0.5)
        {
            const Eigen::VectorXcd cand = normalize_unit(res.phi + step * (target - res.phi), res.phi);
            const Score sc = score(sur.products(cand), noise, thresholds);
            if ((sc.feasible || !cur.feasible) && sc.sum_rate > cur.sum_rate + kImprove)
            {
                const double gain = sc.sum_rate - cur.sum_rate;
                res.phi = cand;
                cur = sc;
                accepted = true;
                ++res.accepted;
                if (gain < params.sca_tol)
                    round = params.sca_rounds;
            }
        }
        if (!accepted)
            break;
    }

    if (params.polish)
        polish(sur, res.phi, thresholds, noise, params);
    return res;
}

} // namespace flexsim
