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

#include "flexsim/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace flexsim
{

Problem::Problem(const ScenarioConfig &cfg, UserGeometry geom)
    : layout(cfg), geometry(std::move(geom)), constraints(build_constraints(layout)), noise(cfg.noise_vars),
      power_budget(cfg.power_budget), thresholds(Eigen::VectorXd::Zero(cfg.num_users))
{
    if (geometry.num_users() != cfg.num_users)
        throw std::invalid_argument("geometry and configuration disagree on the number of users");
}

Eigen::MatrixXcd cascaded_channel(const Problem &problem, const Eigen::VectorXd &y, const PhaseStack &phases)
{
    return cascade(build_channels(problem.layout, y, problem.geometry), phases);
}

RateReport evaluate(const Problem &problem, const SystemState &state)
{
    return sinr_and_rates(cascaded_channel(problem, state.morph.y, state.phases), state.W, problem.noise);
}

Precoder zero_forcing(const Eigen::MatrixXcd &G, double power_budget)
{
    const int K = static_cast<int>(G.rows());
    if (K > G.cols())
        throw DegenerateScenarioError("more users than transmit antennas");
    const Eigen::MatrixXcd gram = G * G.adjoint();
    const Eigen::VectorXd sv = gram.selfadjointView<Eigen::Lower>().eigenvalues();
    const double smax = sv.maxCoeff();
    if (!(smax > 0.0) || !std::isfinite(smax) || sv.minCoeff() <= smax * 1e-13)
        throw DegenerateScenarioError("cascaded channel matrix is rank deficient");

    Precoder W = G.adjoint() * gram.ldlt().solve(Eigen::MatrixXcd::Identity(K, K));
    const double per_user = std::sqrt(power_budget / K);
    for (int k = 0; k < K; ++k)
        W.col(k) *= per_user / W.col(k).norm();
    return W;
}

SystemState init_state(Problem &problem, Architecture mode, PhaseMode phase_mode)
{
    const auto &cfg = problem.config();
    SystemState s;
    s.morph = MorphState::zeros(cfg, mode);
    s.phases = phase_mode == PhaseMode::Discrete ? PhaseStack::ones_quantized(cfg.total_atoms(), cfg.quant_bits)
                                                 : PhaseStack::ones(cfg.total_atoms());
    const Eigen::MatrixXcd G = cascaded_channel(problem, s.morph.y, s.phases);
    s.W = zero_forcing(G, problem.power_budget);

    const RateReport r = sinr_and_rates(G, s.W, problem.noise);
    problem.thresholds.resize(cfg.num_users);
    for (int k = 0; k < cfg.num_users; ++k)
        problem.thresholds[k] = std::log2(1.0 + cfg.rate_threshold_factor * r.sinr[k]);
    return s;
}

bool FeasibilityReport::ok(double tol) const
{
    return power_excess <= tol && qos_violation <= kQosTol && morph_violation <= tol && mode_violation <= tol &&
           modulus_error <= tol && alphabet_ok && min_pair_distance >= min_distance_required - tol;
}

FeasibilityReport check_feasibility(const Problem &problem, const SystemState &state)
{
    const auto &cfg = problem.config();
    const int N = cfg.atoms_per_layer;
    const int L = cfg.num_layers;
    const Eigen::VectorXd &y = state.morph.y;

    FeasibilityReport f;
    f.power_excess = std::max(0.0, state.W.squaredNorm() - problem.power_budget);
    f.power_excess /= problem.power_budget;
    const RateReport r = evaluate(problem, state);
    f.qos_violation = qos_violations(r, problem.thresholds).maxCoeff();
    f.morph_violation = problem.constraints.max_violation(y);
    f.mode_violation = (y - project_mode(y, state.morph.mode, L, N)).lpNorm<Eigen::Infinity>();
    f.modulus_error = state.phases.max_modulus_error();
    if (state.phases.quantized())
        for (Eigen::Index i = 0; i < state.phases.phi.size(); ++i)
        {
            const int u = state.phases.index[i];
            if (u < 0 || u >= static_cast<int>(state.phases.alphabet.size()) ||
                state.phases.phi[i] != state.phases.alphabet[u])
                f.alphabet_ok = false;
        }

    // Minimum-distance constraints: every first-layer atom against its closest
    // antenna, and aligned atoms of adjacent layers.
    f.min_distance_required = cfg.min_distance;
    f.min_pair_distance = std::numeric_limits<double>::infinity();
    for (int n = 0; n < N; ++n)
    {
        for (int m = 0; m < cfg.num_tx_antennas; ++m)
            f.min_pair_distance = std::min(f.min_pair_distance, distance_and_cos(problem.layout, 0, n, m, y).distance);
        for (int l = 1; l < L; ++l)
            f.min_pair_distance = std::min(f.min_pair_distance, distance_and_cos(problem.layout, l, n, n, y).distance);
    }
    return f;
}

} // namespace flexsim
