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
#include "flexsim/problem.hpp"
#include "test_util.hpp"

#include <catch_amalgamated.hpp>

using namespace flexsim;
using Catch::Approx;

namespace
{

struct Instance
{
    ScenarioConfig cfg;
    UserGeometry geom;
    Layout layout;
    Eigen::VectorXd y;
    PhaseStack phases;
    Precoder W;
    std::vector<double> noise;

    explicit Instance(std::uint64_t seed, int L = 3)
        : cfg(test::small_config(2, L, 4, 2, 2)), geom(sample_scenario(cfg, 500 + seed)), layout(cfg),
          phases(PhaseStack::ones(cfg.total_atoms()))
    {
        std::mt19937_64 rng(seed);
        y = test::random_feasible_y(rng, build_constraints(layout));
        phases.phi = test::random_unit(rng, cfg.total_atoms());
        W = test::random_precoder(rng, cfg.num_tx_antennas, cfg.num_users, cfg.power_budget);
        const RateReport r = rates(y, cfg.noise_vars);
        noise.resize(cfg.num_users);
        for (int k = 0; k < cfg.num_users; ++k)
            noise[k] = r.power.row(k).sum();
    }

    Eigen::MatrixXcd G(const Eigen::VectorXd &yy) const
    {
        return cascade(build_channels(layout, yy, geom), phases);
    }
    RateReport rates(const Eigen::VectorXd &yy, const std::vector<double> &nv) const
    {
        return sinr_and_rates(G(yy), W, nv);
    }
    GradWorkspace workspace(const Precoder &WW) const
    {
        const ChannelStack st = build_channels(layout, y, geom, true);
        GradWorkspace ws = make_workspace(st, phases, WW);
        compute_product_derivatives(ws, st);
        return ws;
    }
};

// Largest deviation over coordinates that carry signal, relative to the
// infinity norm of the reference.
double rel_err(const Eigen::VectorXd &a, const Eigen::VectorXd &f)
{
    const double scale = f.lpNorm<Eigen::Infinity>();
    double err = 0.0;
    for (Eigen::Index i = 0; i < f.size(); ++i)
        if (std::abs(f[i]) >= 1e-6 * scale)
            err = std::max(err, std::abs(a[i] - f[i]));
    return err / scale;
}

} // namespace

TEST_CASE("workspace products recompose at every split", "[gradients]")
{
    const Instance in(1, 4);
    const ChannelStack st = build_channels(in.layout, in.y, in.geom, true);
    const GradWorkspace ws = make_workspace(st, in.phases, in.W);
    const Eigen::MatrixXcd ref = in.G(in.y) * in.W;
    CHECK(test::rel_diff(ws.products, ref) < 1e-12);
    for (int l = 0; l < in.cfg.num_layers; ++l)
        for (int k = 0; k < in.cfg.num_users; ++k)
            for (int i = 0; i < in.cfg.num_users; ++i)
            {
                const cdouble v = ws.prefix[l][k].transpose() * st.omega[l] * ws.suffix[l][i];
                CHECK(std::abs(v - ref(k, i)) <= 1e-12 * std::abs(ref(k, i)));
            }
}

TEST_CASE("received power gradient matches central differences", "[gradients]")
{
    for (std::uint64_t seed = 0; seed < 10; ++seed)
    {
        const Instance in(seed);
        const GradWorkspace ws = in.workspace(in.W);
        const double h = 1e-6 * in.cfg.wavelength();
        for (int k = 0; k < 2; ++k)
            for (int i = 0; i < 2; ++i)
            {
                const Eigen::VectorXd f = fd_oracle(
                    [&](const Eigen::VectorXd &yy) { return std::norm((in.G(yy) * in.W)(k, i)); }, in.y, h);
                CHECK(rel_err(grad_J(ws, k, i), f) < 1e-4);
            }
    }
}

TEST_CASE("rate and augmented gradients match central differences", "[gradients]")
{
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::uint64_t seed = 0; seed < 10; ++seed)
    {
        const Instance in(seed);
        const GradWorkspace ws = in.workspace(in.W);
        const RateReport rep = rates_from_products(ws.products, in.noise);
        const double h = 1e-6 * in.cfg.wavelength();

        const Eigen::VectorXd f_sum =
            fd_oracle([&](const Eigen::VectorXd &yy) { return in.rates(yy, in.noise).sum_rate; }, in.y, h);
        CHECK(rel_err(grad_sum_rate(ws, in.noise), f_sum) < 1e-4);

        const auto gr = grad_rates(ws, in.noise);
        for (int k = 0; k < 2; ++k)
        {
            const Eigen::VectorXd f =
                fd_oracle([&](const Eigen::VectorXd &yy) { return in.rates(yy, in.noise).rate[k]; }, in.y, h);
            CHECK(rel_err(gr[k], f) < 1e-4);
        }

        const Eigen::Vector2d thr = rep.rate * (1.0 + 0.5 * u(rng));
        const Eigen::Vector2d slack(0.5 * u(rng), 0.5 * u(rng));
        const double omega = 0.3 + u(rng);
        const Eigen::VectorXd f_aug = fd_oracle(
            [&](const Eigen::VectorXd &yy) { return augmented_objective(in.rates(yy, in.noise), thr, slack, omega); },
            in.y, h);
        CHECK(rel_err(grad_aug(ws, rep, in.noise, thr, slack, omega), f_aug) < 1e-4);
    }
}

TEST_CASE("power gradient is quadratic in the precoder", "[gradients]")
{
    const Instance in(3);
    const GradWorkspace a = in.workspace(in.W), b = in.workspace(2.0 * in.W);
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i)
            CHECK((grad_J(b, k, i) - 4.0 * grad_J(a, k, i)).norm() <= 1e-12 * grad_J(b, k, i).norm());
}

TEST_CASE("zero residuals reduce the augmented gradient to the rate gradient", "[gradients]")
{
    const Instance in(4);
    const GradWorkspace ws = in.workspace(in.W);
    const RateReport rep = rates_from_products(ws.products, in.noise);
    const Eigen::VectorXd slack = Eigen::VectorXd::Zero(2);
    const Eigen::VectorXd a = grad_aug(ws, rep, in.noise, rep.rate, slack, 0.2);
    const Eigen::VectorXd s = grad_sum_rate(ws, in.noise);
    CHECK((a - s).norm() <= 1e-14 * s.norm());
}

TEST_CASE("finite differences on simple functions", "[gradients]")
{
    Eigen::Vector3d c(1.0, -2.0, 0.5), y0(0.3, 0.1, -0.7);
    for (double h : {1e-1, 1e-4})
    {
        const Eigen::VectorXd g = fd_oracle([&](const Eigen::VectorXd &y) { return c.dot(y) + 4.0; }, y0, h);
        CHECK((g - c).norm() < 1e-9);
    }
    const Eigen::VectorXd q = fd_oracle([](const Eigen::VectorXd &y) { return y.squaredNorm(); }, y0, 1e-5);
    CHECK((q - 2.0 * y0).norm() < 1e-9);
}

TEST_CASE("finite-difference error curve over the step size", "[gradients]")
{
    const Instance in(5);
    const GradWorkspace ws = in.workspace(in.W);
    const Eigen::VectorXd a = grad_sum_rate(ws, in.noise);
    const double lam = in.cfg.wavelength();
    double e[3];
    const double steps[3] = {1e-5, 1e-6, 1e-7};
    for (int s = 0; s < 3; ++s)
        e[s] = rel_err(a, fd_oracle([&](const Eigen::VectorXd &yy) { return in.rates(yy, in.noise).sum_rate; },
                                    in.y, steps[s] * lam));
    INFO("errors " << e[0] << " " << e[1] << " " << e[2]);
    CHECK(std::log(e[1]) <= 0.5 * (std::log(e[0]) + std::log(e[2])));
}
