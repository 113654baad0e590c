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
#include "flexsim/scenario.hpp"
#include "test_util.hpp"

#include <catch_amalgamated.hpp>

using namespace flexsim;
using Catch::Approx;

TEST_CASE("dBm conversion", "[scenario]")
{
    CHECK(dbm_to_watt(0.0) == Approx(1e-3).epsilon(1e-14));
    CHECK(dbm_to_watt(25.0) == Approx(0.316227766).epsilon(1e-9));
    CHECK(dbm_to_watt(-104.0) == Approx(3.98107e-14).epsilon(1e-5));
    CHECK(watt_to_dbm(dbm_to_watt(17.5)) == Approx(17.5).epsilon(1e-14));
}

TEST_CASE("architecture and phase mode names round trip", "[scenario]")
{
    for (auto a : {Architecture::RSIM, Architecture::HSIM, Architecture::DSIM, Architecture::SFIM})
        CHECK(parse_architecture(to_string(a)) == a);
    for (auto p : {PhaseMode::Continuous, PhaseMode::Discrete})
        CHECK(parse_phase_mode(to_string(p)) == p);
    CHECK_THROWS(parse_architecture("XSIM"));
}

TEST_CASE("default configuration is valid and wavelength scaled", "[scenario]")
{
    const ScenarioConfig cfg = ScenarioConfig::defaults();
    REQUIRE_NOTHROW(cfg.validate());
    const double lam = cfg.wavelength();
    CHECK(lam == Approx(kSpeedOfLight / 28e9));
    CHECK(cfg.nominal_gaps.size() == 6u);
    CHECK(cfg.nominal_gaps[0] == Approx(6.0 * lam));
    CHECK(cfg.morph_range == Approx(lam / 2.0));
    CHECK(cfg.total_atoms() == 216);
    CHECK(cfg.quant_levels() == 4);
}

TEST_CASE("validate rejects broken configurations", "[scenario]")
{
    ScenarioConfig cfg = ScenarioConfig::defaults();
    cfg.atoms_per_row = 5; // does not divide 36
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

    cfg = ScenarioConfig::defaults();
    cfg.noise_vars.pop_back();
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

    cfg = ScenarioConfig::defaults();
    cfg.num_paths = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("set_num_layers keeps the total thickness when asked", "[scenario]")
{
    ScenarioConfig cfg = ScenarioConfig::defaults();
    const double total = 6 * cfg.nominal_gaps[0];
    cfg.set_num_layers(4, true);
    REQUIRE(cfg.nominal_gaps.size() == 4u);
    CHECK(cfg.nominal_gaps[0] * 4 == Approx(total));
    cfg.set_num_layers(5, false);
    CHECK(cfg.nominal_gaps.size() == 5u);
}

TEST_CASE("set_atoms_per_layer picks a square-ish grid", "[scenario]")
{
    ScenarioConfig cfg = ScenarioConfig::defaults();
    cfg.set_atoms_per_layer(49);
    CHECK(cfg.atoms_per_row == 7);
    cfg.set_atoms_per_layer(12);
    CHECK(cfg.atoms_per_row == 3);
    cfg.set_atoms_per_layer(7);
    CHECK(cfg.atoms_per_row == 1);
}

TEST_CASE("sample_scenario is deterministic in the seed", "[scenario]")
{
    const ScenarioConfig cfg = ScenarioConfig::defaults();
    const UserGeometry a = sample_scenario(cfg, 1), b = sample_scenario(cfg, 1), c = sample_scenario(cfg, 2);
    bool differs = false;
    for (int k = 0; k < cfg.num_users; ++k)
        for (int i = 0; i < cfg.num_paths; ++i)
        {
            const auto &p = a.paths[k][i], &q = b.paths[k][i];
            CHECK(p.gain == q.gain);
            CHECK(p.azimuth == q.azimuth);
            CHECK(p.elevation == q.elevation);
            CHECK(p.distance == q.distance);
            differs = differs || p.distance != c.paths[k][i].distance;
        }
    CHECK(differs);
}

TEST_CASE("line-of-sight distances lie in 95..105 m and gains are finite", "[scenario]")
{
    const ScenarioConfig cfg = ScenarioConfig::defaults();
    for (std::uint64_t seed = 0; seed < 50; ++seed)
    {
        const UserGeometry g = sample_scenario(cfg, seed);
        REQUIRE(g.num_users() == cfg.num_users);
        for (const auto &user : g.paths)
        {
            REQUIRE(static_cast<int>(user.size()) == cfg.num_paths);
            CHECK(user[0].distance >= 95.0);
            CHECK(user[0].distance <= 105.0);
            CHECK(std::arg(user[0].gain) == 0.0);
            for (const auto &p : user)
            {
                CHECK(std::isfinite(std::abs(p.gain)));
                CHECK(std::abs(p.gain) > 0.0);
            }
        }
    }
}

TEST_CASE("path gains follow free-space loss with a 10 dB scattering penalty", "[scenario]")
{
    const ScenarioConfig cfg = ScenarioConfig::defaults();
    const double lam = cfg.wavelength();
    const UserGeometry g = sample_scenario(cfg, 9);
    for (const auto &user : g.paths)
        for (size_t i = 0; i < user.size(); ++i)
        {
            const double fs = std::pow(lam / (4.0 * kPi * user[i].distance), 2);
            const double expected = i == 0 ? fs : 0.1 * fs;
            CHECK(std::norm(user[i].gain) == Approx(expected).epsilon(1e-12));
        }
}

TEST_CASE("a single path means line of sight only", "[scenario]")
{
    ScenarioConfig cfg = ScenarioConfig::defaults();
    cfg.num_paths = 1;
    const UserGeometry g = sample_scenario(cfg, 4);
    for (const auto &user : g.paths)
        CHECK(user.size() == 1u);
}

TEST_CASE("initial state: full power, feasible, thresholds below the initial rates", "[scenario][problem]")
{
    const ScenarioConfig cfg = test::small_config(4, 3, 9, 3, 3);
    for (std::uint64_t seed = 0; seed < 5; ++seed)
    {
        Problem prob(cfg, sample_scenario(cfg, seed));
        for (auto pm : {PhaseMode::Continuous, PhaseMode::Discrete})
        {
            const SystemState s = init_state(prob, Architecture::SFIM, pm);
            CHECK(s.W.squaredNorm() == Approx(cfg.power_budget).epsilon(1e-12));
            CHECK(s.morph.y.isZero(0.0));
            CHECK(check_feasibility(prob, s).ok());
            const RateReport r = evaluate(prob, s);
            for (int k = 0; k < cfg.num_users; ++k)
                CHECK(prob.thresholds[k] < r.rate[k]);
            CHECK(s.phases.quantized() == (pm == PhaseMode::Discrete));
        }
    }
}

TEST_CASE("initial state is reproducible", "[scenario][problem]")
{
    const ScenarioConfig cfg = test::small_config(3, 2, 4, 2, 2);
    Problem a(cfg, sample_scenario(cfg, 3)), b(cfg, sample_scenario(cfg, 3));
    const SystemState sa = init_state(a, Architecture::DSIM, PhaseMode::Continuous);
    const SystemState sb = init_state(b, Architecture::DSIM, PhaseMode::Continuous);
    CHECK(sa.W == sb.W);
    CHECK(a.thresholds == b.thresholds);
}

TEST_CASE("single-user zero forcing is the matched filter", "[problem]")
{
    std::mt19937_64 rng(5);
    const Eigen::MatrixXcd g = test::random_complex(rng, 1, 4);
    const Precoder W = zero_forcing(g, 2.0);
    const Eigen::VectorXcd mf = g.row(0).adjoint() * std::sqrt(2.0) / g.norm();
    CHECK((W.col(0) - mf).norm() < 1e-12);
}

TEST_CASE("zero forcing nulls interference and rejects rank-deficient channels", "[problem]")
{
    std::mt19937_64 rng(6);
    const Eigen::MatrixXcd G = test::random_complex(rng, 3, 5);
    const Precoder W = zero_forcing(G, 1.5);
    const Eigen::MatrixXcd S = G * W;
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
            if (i != k)
                CHECK(std::abs(S(k, i)) < 1e-10 * std::abs(S(k, k)));
    CHECK(W.squaredNorm() == Approx(1.5).epsilon(1e-12));

    Eigen::MatrixXcd D = G;
    D.row(2) = D.row(1);
    CHECK_THROWS_AS(zero_forcing(D, 1.0), DegenerateScenarioError);
}
