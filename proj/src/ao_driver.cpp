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

#include "flexsim/ao_driver.hpp"

#include <chrono>
#include <cmath>

namespace flexsim
{

namespace
{

AoTraceRow make_row(int iteration, const Problem &problem, const SystemState &state, const MorphOptState &ms,
                    double wall_ms)
{
    const RateReport r = evaluate(problem, state);
    AoTraceRow row;
    row.iteration = iteration;
    row.sum_rate = r.sum_rate;
    row.aug = augmented_objective(r, problem.thresholds, ms.slack, ms.omega);
    row.rates = r.rate;
    row.max_violation = qos_violations(r, problem.thresholds).maxCoeff();
    row.omega = ms.omega;
    row.max_abs_y = state.morph.y.size() ? state.morph.y.lpNorm<Eigen::Infinity>() : 0.0;
    row.wall_ms = wall_ms;
    return row;
}

void update_phases(const Problem &problem, SystemState &state, PhaseMode phase_mode, const PhaseParams &params)
{
    const int L = problem.layout.L();
    const int N = problem.layout.N();
    const ChannelStack stack = build_channels(problem.layout, state.morph.y, problem.geometry);
    for (int l = 0; l < L; ++l)
    {
        const LayerSurrogate sur = build_layer_surrogate(l, stack, state.phases, state.W);
        if (phase_mode == PhaseMode::Discrete)
        {
            const std::vector<int> start(state.phases.index.begin() + l * N, state.phases.index.begin() + (l + 1) * N);
            const DiscreteResult res =
                optimize_layer_discrete(sur, start, state.phases.alphabet, problem.thresholds, problem.noise, params);
            for (int n = 0; n < N; ++n)
                state.phases.set_index(l * N + n, res.index[n]);
        }
        else
        {
            const ContinuousResult res = optimize_layer_continuous(sur, problem.thresholds, problem.noise, params);
            state.phases.phi.segment(l * N, N) = res.phi;
        }
    }
}

} // namespace

AoResult run_ao(const Problem &problem, const SystemState &init, Architecture mode, PhaseMode phase_mode,
                const AlgorithmConfig &algo)
{
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    auto elapsed = [&] {
        return algo.ao.timing ? std::chrono::duration<double, std::milli>(clock::now() - t0).count() : 0.0;
    };

    AoResult res;
    res.state = init;
    res.state.morph.mode = mode;
    if (phase_mode == PhaseMode::Discrete && !res.state.phases.quantized())
        throw std::invalid_argument("discrete run needs a quantized phase stack");

    MorphOptState ms = MorphOptState::initial(res.state.morph, problem.layout.K(), algo.morph);
    res.trace.rows.push_back(make_row(0, problem, res.state, ms, elapsed()));
    res.trace.termination = "max_outer";

    for (int it = 1; it <= algo.ao.max_outer; ++it)
    {
        const double prev = res.trace.rows.back().sum_rate;

        if (mode != Architecture::RSIM)
        {
            ms.morph = res.state.morph;
            ms = run_morph_update(ms, problem, res.state.phases, res.state.W, algo.morph);
            res.state.morph = ms.morph;
            res.trace.stalls += ms.stalled;
            res.trace.qos_warning = res.trace.qos_warning || ms.qos_warning;
        }

        const Eigen::MatrixXcd G = cascaded_channel(problem, res.state.morph.y, res.state.phases);
        const BfRunResult bf =
            run_bf_opt(res.state.W, G, problem.noise, problem.thresholds, problem.power_budget, algo.bf);
        res.state.W = bf.W;
        res.trace.stalls += bf.stalled;

        update_phases(problem, res.state, phase_mode, algo.phase);

        res.trace.rows.push_back(make_row(it, problem, res.state, ms, elapsed()));
        if (std::abs(res.trace.rows.back().sum_rate - prev) <= algo.ao.tol)
        {
            res.trace.termination = "converged";
            break;
        }
    }
    return res;
}

AoResult run_ao(const ScenarioConfig &cfg, const UserGeometry &geom, Architecture mode, PhaseMode phase_mode,
                const AlgorithmConfig &algo)
{
    Problem problem(cfg, geom);
    const SystemState init = init_state(problem, mode, phase_mode);
    return run_ao(problem, init, mode, phase_mode, algo);
}

} // namespace flexsim
