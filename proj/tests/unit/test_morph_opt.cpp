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
#include "test_util.hpp"

#include <catch_amalgamated.hpp>

using namespace flexsim;
using Catch::Approx;

namespace
{

struct MorphCase
{
    ScenarioConfig cfg;
    Problem prob;
    SystemState state;

    MorphCase(Architecture mode, std::uint64_t seed, double threshold_factor = 0.95)
        : cfg(make_cfg(threshold_factor)), prob(cfg, sample_scenario(cfg, seed)),
          state(init_state(prob, mode, PhaseMode::Continuous))
    {
    }

    static ScenarioConfig make_cfg(double factor)
    {
        ScenarioConfig c = test::small_config(3, 3, 9, 3, 2);
        c.rate_threshold_factor = factor;
        c.noise_vars.assign(2, dbm_to_watt(-130.0));
        return c;
    }

    RateReport rates(const Eigen::VectorXd &y) const
    {
        return sinr_and_rates(cascaded_channel(prob, y, state.phases), state.W, prob.noise);
    }
};

} // namespace

TEST_CASE("rigid stack never moves", "[morph_opt]")
{
    MorphCase c(Architecture::RSIM, 1);
    const MorphParams params;
    const MorphOptState s0 = MorphOptState::initial(c.state.morph, 2, params);
    const MorphOptState s1 = morph_step(s0, c.prob, c.state.phases, c.state.W, params);
    CHECK(s1.morph.y.isZero(0.0));
    CHECK(s1.stalled);
    CHECK(run_morph_update(s0, c.prob, c.state.phases, c.state.W, params).morph.y.isZero(0.0));
}

TEST_CASE("no admissible move leaves the point and flags a stall", "[morph_opt]")
{
    MorphCase c(Architecture::SFIM, 2);
    c.prob.constraints.morph_range = 0.0;
    const MorphParams params;
    const MorphOptState s0 = MorphOptState::initial(c.state.morph, 2, params);
    const MorphOptState s1 = morph_step(s0, c.prob, c.state.phases, c.state.W, params);
    CHECK(s1.morph.y == s0.morph.y);
    CHECK(s1.stalled);
}

TEST_CASE("slack update keeps only the rate surplus", "[morph_opt]")
{
    MorphCase c(Architecture::RSIM, 3);
    const RateReport r = c.rates(c.state.morph.y);
    c.prob.thresholds = Eigen::Vector2d(r.rate[0] - 1.0, r.rate[1] + 1.0);
    const MorphParams params;
    const MorphOptState s = morph_step(MorphOptState::initial(c.state.morph, 2, params), c.prob, c.state.phases,
                                       c.state.W, params);
    CHECK(s.slack[0] == Approx(1.0).epsilon(1e-12));
    CHECK(s.slack[1] == 0.0);
}

TEST_CASE("penalty schedule", "[morph_opt]")
{
    MorphParams params;
    RateReport rep;
    rep.rate = Eigen::Vector2d(1.0, 2.0);
    rep.sum_rate = 3.0;
    MorphOptState s;
    s.slack = Eigen::Vector2d::Zero();
    s.omega = 1.0;

    CHECK(penalty_schedule(s, rep, Eigen::Vector2d(0.5, 1.0), params).omega == 1.0);

    const MorphOptState tightened = penalty_schedule(s, rep, Eigen::Vector2d(1.5, 1.0), params);
    CHECK(tightened.omega == 0.5);
    CHECK_FALSE(tightened.qos_warning);

    s.omega = params.omega_floor;
    const MorphOptState floored = penalty_schedule(s, rep, Eigen::Vector2d(1.5, 1.0), params);
    CHECK(floored.omega == params.omega_floor);
    CHECK(floored.qos_warning);
    CHECK(params.omega_floor > 0.0);
}

TEST_CASE("backtracking budget", "[morph_opt]")
{
    const MorphParams params;
    CHECK(params.max_halvings <= 60);
}

TEST_CASE("every emitted point is feasible and follows the architecture pattern", "[morph_opt]")
{
    for (auto mode : {Architecture::HSIM, Architecture::DSIM, Architecture::SFIM})
        for (std::uint64_t seed = 0; seed < 3; ++seed)
        {
            MorphCase c(mode, 10 + seed);
            const MorphParams params;
            MorphOptState s = MorphOptState::initial(c.state.morph, 2, params);
            for (int it = 0; it < 6; ++it)
            {
                s = run_morph_update(s, c.prob, c.state.phases, c.state.W, params);
                const Eigen::VectorXd &y = s.morph.y;
                CHECK(c.prob.constraints.max_violation(y) <= 1e-8);
                CHECK((project_mode(y, mode, c.cfg.num_layers, c.cfg.atoms_per_layer) - y).lpNorm<Eigen::Infinity>() ==
                      0.0);
                CHECK(s.omega >= params.omega_floor);
                CHECK(s.slack.minCoeff() >= 0.0);
            }
        }
}

TEST_CASE("with zero thresholds the sum rate never drops across morph updates", "[morph_opt]")
{
    for (std::uint64_t seed = 0; seed < 3; ++seed)
    {
        MorphCase c(Architecture::SFIM, 20 + seed, 0.0);
        REQUIRE(c.prob.thresholds.isZero(0.0));
        const MorphParams params;
        MorphOptState s = MorphOptState::initial(c.state.morph, 2, params);
        double prev = c.rates(s.morph.y).sum_rate;
        int moved = 0;
        for (int it = 0; it < 8; ++it)
        {
            s = run_morph_update(s, c.prob, c.state.phases, c.state.W, params);
            const double now = c.rates(s.morph.y).sum_rate;
            CHECK(now >= prev - 1e-8);
            moved += now > prev;
            prev = now;
        }
        CHECK(moved > 0);
    }
}

TEST_CASE("morph trace records each attempt", "[morph_opt]")
{
    MorphCase c(Architecture::SFIM, 30);
    const MorphParams params;
    std::vector<MorphTraceRow> trace;
    run_morph_update(MorphOptState::initial(c.state.morph, 2, params), c.prob, c.state.phases, c.state.W, params,
                     &trace);
    REQUIRE_FALSE(trace.empty());
    CHECK(trace.front().iteration == 1);
    for (const auto &r : trace)
        CHECK(r.step <= c.cfg.morph_range * 2.0);
}
