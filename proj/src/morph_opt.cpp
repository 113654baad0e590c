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

#include "flexsim/morph_opt.hpp"

#include "flexsim/gradients.hpp"

#include <cmath>

namespace flexsim
{

MorphOptState MorphOptState::initial(const MorphState &morph, int num_users, const MorphParams &params)
{
    MorphOptState s;
    s.morph = morph;
    s.slack = Eigen::VectorXd::Zero(num_users);
    s.omega = params.omega_init;
    return s;
}

namespace
{

RateReport rates_at(const Problem &problem, const Eigen::VectorXd &y, const PhaseStack &phases, const Precoder &W)
{
    return sinr_and_rates(cascaded_channel(problem, y, phases), W, problem.noise);
}

Eigen::VectorXd slack_from(const RateReport &r, const Eigen::VectorXd &thresholds)
{
    return (r.rate - thresholds).cwiseMax(0.0);
}


} // namespace

MorphOptState morph_step(const MorphOptState &state, const Problem &problem, const PhaseStack &phases,
                         const Precoder &W, const MorphParams &params)
{
    MorphOptState out = state;
    out.stalled = false;
    out.last_step = 0.0;
    ++out.iterations;

    const auto &cfg = problem.config();
    const Architecture mode = state.morph.mode;
    const Eigen::VectorXd &y0 = state.morph.y;
    const double lam = problem.layout.wavelength();

    const ChannelStack stack = build_channels(problem.layout, y0, problem.geometry, true);
    GradWorkspace ws = make_workspace(stack, phases, W);
    compute_product_derivatives(ws, stack);
    const RateReport rep0 = rates_from_products(ws.products, problem.noise);
    const Eigen::VectorXd grad =
        grad_aug(ws, rep0, problem.noise, problem.thresholds, state.slack, state.omega);
    const double aug0 = augmented_objective(rep0, problem.thresholds, state.slack, state.omega);

    // Size the first trial by the direction that survives the architecture
    // pattern, so constrained modes are not starved by discarded components.
    const Eigen::VectorXd dir = project_mode(grad, mode, cfg.num_layers, cfg.atoms_per_layer);
    const double gmax = dir.lpNorm<Eigen::Infinity>();

    bool accepted = false;
    RateReport rep_new = rep0;
    if (mode != Architecture::RSIM && gmax > 0.0 && std::isfinite(gmax))
    {
        double delta = params.initial_move * lam / gmax;
        for (int h = 0; h <= params.max_halvings; ++h, delta *= 0.5)
        {
            const Eigen::VectorXd cand = project_feasible_mode(y0 + delta * grad, problem.constraints, mode);
            const double move2 = (cand - y0).squaredNorm() / (lam * lam);
            if (move2 == 0.0)
                continue;
            const RateReport rep = rates_at(problem, cand, phases, W);
            const double aug = augmented_objective(rep, problem.thresholds, state.slack, state.omega);
            if (aug >= aug0 + params.sufficient_increase * move2)
            {
                out.last_step = (cand - y0).lpNorm<Eigen::Infinity>();
                out.morph.y = cand;
                rep_new = rep;
                accepted = true;
                break;
            }
        }
    }
    if (!accepted)
        out.stalled = true;
    out.slack = slack_from(rep_new, problem.thresholds);
    return out;
}

MorphOptState penalty_schedule(const MorphOptState &state, const RateReport &report, const Eigen::VectorXd &thresholds,
                               const MorphParams &params)
{
    MorphOptState out = state;
    if (qos_violations(report, thresholds).maxCoeff() <= params.qos_tol)
        return out;
    if (out.omega > params.omega_floor)
        out.omega = std::max(params.kappa * out.omega, params.omega_floor);
    else
        out.qos_warning = true;
    return out;
}

MorphOptState run_morph_update(const MorphOptState &state, const Problem &problem, const PhaseStack &phases,
                               const Precoder &W, const MorphParams &params, std::vector<MorphTraceRow> *trace)
{
    if (state.morph.mode == Architecture::RSIM)
        return state;

    const RateReport start = rates_at(problem, state.morph.y, phases, W);
    MorphOptState s = state;
    s.qos_warning = false;
    s.slack = slack_from(start, problem.thresholds);

    RateReport rep = start;
    for (int attempt = 0; attempt <= params.max_retries; ++attempt)
    {
        s = morph_step(s, problem, phases, W, params);
        rep = rates_at(problem, s.morph.y, phases, W);
        if (trace)
            trace->push_back({s.iterations, rep.sum_rate,
                              augmented_objective(rep, problem.thresholds, s.slack, s.omega), s.omega,
                              qos_violations(rep, problem.thresholds).maxCoeff(), s.last_step});
        if (qos_violations(rep, problem.thresholds).maxCoeff() <= params.qos_tol || s.stalled)
            break;
        s = penalty_schedule(s, rep, problem.thresholds, params);
        if (s.qos_warning)
            break;
    }

    // Only hand back a point that keeps every rate target and the sum rate.
    const bool qos_ok = meets_qos(rep, problem.thresholds, params.qos_tol);
    if (!qos_ok || rep.sum_rate < start.sum_rate)
    {
        s.morph = state.morph;
        s.slack = slack_from(start, problem.thresholds);
        s.stalled = true;
    }
    return s;
}

} // namespace flexsim
