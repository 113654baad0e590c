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
#include "flexsim/rate_sca.hpp"
#include "flexsim/verify/oracles.hpp"
#include "test_util.hpp"

#include <catch_amalgamated.hpp>

using namespace flexsim;
using Catch::Approx;

namespace
{

RateScaProblem random_problem(std::mt19937_64 &rng, int K, int n)
{
    RateScaProblem p;
    p.K = K;
    p.coeff.resize(static_cast<size_t>(K) * K);
    for (auto &c : p.coeff)
        c = test::random_complex(rng, n, 1).col(0);
    p.x0 = test::random_complex(rng, n, 1).col(0);
    p.x0 /= 2.0 * p.x0.norm();
    p.qos = Eigen::VectorXd::Zero(K);
    return p;
}

} // namespace

TEST_CASE("surrogate is tight at the expansion point and a lower bound elsewhere", "[rate_sca]")
{
    std::mt19937_64 rng(1);
    for (int t = 0; t < 10; ++t)
    {
        const RateScaProblem p = random_problem(rng, 3, 5);
        CHECK(surrogate_value(p, p.x0) == Approx(true_rate_sum(p, p.x0)).epsilon(1e-12));
        for (int s = 0; s < 20; ++s)
        {
            Eigen::VectorXcd x = test::random_complex(rng, 5, 1).col(0);
            x /= x.norm();
            CHECK(surrogate_value(p, x) <= true_rate_sum(p, x) + 1e-12);
        }
    }
}

TEST_CASE("solver improves the surrogate and respects the ball", "[rate_sca]")
{
    std::mt19937_64 rng(2);
    for (int t = 0; t < 5; ++t)
    {
        const RateScaProblem p = random_problem(rng, 2, 4);
        const RateScaSolution s = solve_rate_sca(p);
        CHECK(s.converged);
        CHECK(s.x.squaredNorm() <= p.radius2 + 1e-9);
        CHECK(s.surrogate >= s.surrogate_x0 - 1e-9);
        CHECK(true_rate_sum(p, s.x) >= s.surrogate - 1e-9);
    }
}

TEST_CASE("surrogate QoS is conservative for the true rates", "[rate_sca]")
{
    std::mt19937_64 rng(3);
    for (int t = 0; t < 5; ++t)
    {
        RateScaProblem p = random_problem(rng, 2, 6);
        const Eigen::VectorXd r0 = true_rates(p, p.x0);
        for (int k = 0; k < 2; ++k)
            p.qos[k] = std::exp2(0.8 * r0[k]) - 1.0;
        const RateScaSolution s = solve_rate_sca(p);
        REQUIRE(s.qos_feasible);
        const Eigen::VectorXd r = true_rates(p, s.x);
        for (int k = 0; k < 2; ++k)
            CHECK(r[k] >= 0.8 * r0[k] - 1e-9);
    }
}

TEST_CASE("unit-disc region bounds every entry", "[rate_sca]")
{
    std::mt19937_64 rng(4);
    RateScaProblem p = random_problem(rng, 2, 5);
    p.region = RateScaProblem::Region::UnitDisc;
    p.x0 = test::random_unit(rng, 5) * 0.9;
    const RateScaSolution s = solve_rate_sca(p);
    for (Eigen::Index j = 0; j < s.x.size(); ++j)
        CHECK(std::abs(s.x[j]) <= 1.0 + 1e-9);
}

TEST_CASE("single user reaches the matched-filter rate", "[bf_opt]")
{
    for (int seed = 0; seed < 3; ++seed)
    {
        std::mt19937_64 rng(10 + seed);
        const Eigen::MatrixXcd g = test::random_complex(rng, 1, 4);
        const double P = 0.3, noise = g.squaredNorm() * P / 255.0; // MRT rate of 8 bits
        const Precoder W0 = test::random_precoder(rng, 4, 1, P);
        const BfRunResult r = run_bf_opt(W0, g, {noise}, Eigen::VectorXd::Zero(1), P);
        const double got = sinr_and_rates(g, r.W, {noise}).sum_rate;
        const double best = verify::mrt_rate(g.row(0).transpose(), P, noise);
        CHECK(got <= best + 1e-9);
        CHECK(got >= best - 1e-3);
    }
}

TEST_CASE("precoder optimization is monotone and within budget", "[bf_opt]")
{
    std::mt19937_64 rng(20);
    for (int t = 0; t < 4; ++t)
    {
        const Eigen::MatrixXcd G = test::random_complex(rng, 3, 5);
        const double P = 1.0;
        const Precoder W0 = test::random_precoder(rng, 5, 3, P);
        const RateReport r0 = sinr_and_rates(G, W0, {1.0, 1.0, 1.0});
        const Eigen::VectorXd thr = 0.9 * r0.rate;
        const BfRunResult r = run_bf_opt(W0, G, {1.0, 1.0, 1.0}, thr, P);
        for (size_t i = 1; i < r.sum_rate_trace.size(); ++i)
            CHECK(r.sum_rate_trace[i] >= r.sum_rate_trace[i - 1] - 1e-12);
        CHECK(r.W.squaredNorm() <= P + 1e-9);
        CHECK(meets_qos(sinr_and_rates(G, r.W, {1.0, 1.0, 1.0}), thr));
    }
}

TEST_CASE("round limit and fixed point", "[bf_opt]")
{
    std::mt19937_64 rng(21);
    const Eigen::MatrixXcd G = test::random_complex(rng, 2, 4);
    const Precoder W0 = test::random_precoder(rng, 4, 2, 1.0);
    const std::vector<double> noise{0.5, 0.5};
    const Eigen::VectorXd thr = Eigen::VectorXd::Zero(2);

    BfParams one;
    one.max_rounds = 1;
    CHECK(run_bf_opt(W0, G, noise, thr, 1.0, one).rounds == 1);

    BfParams many;
    many.max_rounds = 200;
    many.rate_tol = 1e-10;
    const BfRunResult conv = run_bf_opt(W0, G, noise, thr, 1.0, many);
    const BfRoundResult again = bf_sca_round(conv.W, G, noise, thr, 1.0, many);
    const double r_conv = sinr_and_rates(G, conv.W, noise).sum_rate;
    CHECK(again.sum_rate == Approx(r_conv).margin(1e-6));
    CHECK((again.W - conv.W).norm() <= 1e-2 * conv.W.norm());
}

TEST_CASE("zero thresholds behave like no QoS constraint", "[bf_opt]")
{
    std::mt19937_64 rng(22);
    const Eigen::MatrixXcd G = test::random_complex(rng, 2, 3);
    const Precoder W0 = test::random_precoder(rng, 3, 2, 1.0);
    const std::vector<double> noise{1.0, 2.0};
    const BfRunResult a = run_bf_opt(W0, G, noise, Eigen::VectorXd::Zero(2), 1.0);
    const BfRunResult b = run_bf_opt(W0, G, noise, Eigen::VectorXd(), 1.0);
    CHECK(a.sum_rate_trace.back() == Approx(b.sum_rate_trace.back()).epsilon(1e-9));
}

TEST_CASE("power budget is active when thresholds are slack", "[bf_opt]")
{
    std::mt19937_64 rng(23);
    const Eigen::MatrixXcd G = test::random_complex(rng, 2, 4);
    const Precoder W0 = test::random_precoder(rng, 4, 2, 0.5);
    const BfRunResult r = run_bf_opt(W0, G, {0.1, 0.1}, Eigen::VectorXd::Zero(2), 2.0);
    CHECK(r.W.squaredNorm() == Approx(2.0).epsilon(1e-4));
}
