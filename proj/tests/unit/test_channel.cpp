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

#include "flexsim/channel.hpp"
#include "flexsim/verify/oracles.hpp"
#include "test_util.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <limits>
#include <sstream>

using namespace flexsim;
using Catch::Approx;

TEST_CASE("quantization alphabet", "[channel]")
{
    for (int bits = 1; bits <= 4; ++bits)
    {
        const auto q = quantization_set(bits);
        REQUIRE(static_cast<int>(q.size()) == (1 << bits));
        CHECK(q[0] == cdouble(1.0, 0.0));
        for (size_t u = 0; u < q.size(); ++u)
        {
            CHECK(std::abs(q[u]) == Approx(1.0).epsilon(1e-15));
            CHECK(std::abs(q[u] - std::polar(1.0, 2.0 * kPi * u / q.size())) < 1e-15);
        }
    }
}

TEST_CASE("quantized phase stacks derive values from indices", "[channel]")
{
    PhaseStack ps = PhaseStack::ones_quantized(6, 2);
    CHECK(ps.quantized());
    CHECK(ps.max_modulus_error() == 0.0);
    ps.set_index(3, 1);
    CHECK(ps.index[3] == 1);
    CHECK(ps.phi[3] == ps.alphabet[1]);
    CHECK(ps.layer(1, 3)[0] == ps.alphabet[1]);
    CHECK_FALSE(PhaseStack::ones(4).quantized());
}

TEST_CASE("hand-evaluated broadside coefficient", "[channel]")
{
    const double lam = kSpeedOfLight / 28e9;
    const RsCoefficient c = rs_coefficient(lam * lam / 4.0, 0.0, 6.0 * lam, lam);
    const cdouble expected(1.0 / (288.0 * kPi), -1.0 / 24.0);
    CHECK(std::abs(c.value - expected) < 1e-12);
    CHECK(c.value.real() == Approx(1.105e-3).epsilon(1e-3));
    CHECK(c.value.imag() == Approx(-4.167e-2).epsilon(1e-3));
}

TEST_CASE("coefficient modulus and decay with lateral offset", "[channel]")
{
    const double lam = kSpeedOfLight / 28e9;
    const double area = lam * lam / 4.0, gap = 3.0 * lam;
    double prev = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 40; ++i)
    {
        const double rho = std::pow(0.25 * i * lam, 2);
        const double d = std::sqrt(rho + gap * gap);
        const RsCoefficient c = rs_coefficient(area, rho, gap, lam);
        const double expected = area * (gap / d) / d * std::sqrt(1.0 / std::pow(2.0 * kPi * d, 2) + 1.0 / (lam * lam));
        CHECK(std::abs(c.value) == Approx(expected).epsilon(1e-12));
        CHECK(std::abs(c.value) < prev);
        prev = std::abs(c.value);
    }
}

TEST_CASE("coefficient gap derivative matches finite differences", "[channel]")
{
    const double lam = kSpeedOfLight / 28e9;
    const double area = lam * lam / 4.0;
    for (double rho : {0.0, 0.3 * lam * lam, 2.0 * lam * lam})
        for (double gap : {2.0 * lam, 5.7 * lam})
        {
            const double h = 1e-7 * lam;
            const cdouble fd = (rs_coefficient(area, rho, gap + h, lam).value -
                                rs_coefficient(area, rho, gap - h, lam).value) /
                               (2.0 * h);
            const cdouble an = rs_coefficient(area, rho, gap, lam).d_gap;
            CHECK(std::abs(an - fd) < 1e-6 * std::abs(an));
        }
}

TEST_CASE("phasor of a cycle count drops the integer part", "[channel]")
{
    CHECK(std::abs(unit_phasor_cycles(0.25) - cdouble(0.0, 1.0)) < 1e-15);
    CHECK(std::abs(unit_phasor_cycles(1e7 + 0.25) - cdouble(0.0, 1.0)) < 1e-9);
    CHECK(std::abs(unit_phasor_cycles(-3.5) - cdouble(-1.0, 0.0)) < 1e-15);
}

TEST_CASE("propagation matrices match the coordinate reference", "[channel]")
{
    const ScenarioConfig cfg = test::small_config(3, 3, 4, 2, 1);
    const Layout layout(cfg);
    std::mt19937_64 rng(1);
    const Eigen::VectorXd y = test::random_feasible_y(rng, build_constraints(layout));
    const double lam = cfg.wavelength();
    for (int l = 0; l < cfg.num_layers; ++l)
    {
        const Eigen::MatrixXcd om = build_omega(layout, l, y);
        const int cols = l == 0 ? cfg.num_tx_antennas : cfg.atoms_per_layer;
        REQUIRE(om.rows() == cfg.atoms_per_layer);
        REQUIRE(om.cols() == cols);
        for (int n = 0; n < om.rows(); ++n)
            for (int m = 0; m < cols; ++m)
            {
                const Point3 rx = verify::atom_position_naive(cfg, l, n, y);
                const Point3 tx = l == 0 ? verify::antenna_position_naive(cfg, m)
                                         : verify::atom_position_naive(cfg, l - 1, m, y);
                const cdouble ref =
                    verify::rs_entry_naive(l == 0 ? cfg.antenna_area : cfg.atom_area, rx, tx, lam);
                CHECK(std::abs(om(n, m) - ref) < 1e-10 * std::abs(ref));
            }
    }
}

TEST_CASE("equal shift of adjacent layers leaves the propagation matrix unchanged", "[channel]")
{
    const ScenarioConfig cfg = test::small_config(2, 3, 4, 2, 1);
    const Layout layout(cfg);
    const int N = cfg.atoms_per_layer;
    Eigen::VectorXd y = Eigen::VectorXd::Zero(cfg.total_atoms()), ys = y;
    ys.segment(N, 2 * N).array() += 0.7e-3;
    CHECK(test::rel_diff(build_omega(layout, 2, y), build_omega(layout, 2, ys)) < 1e-12);
}

TEST_CASE("moving one atom touches one row of its layer and one column of the next", "[channel]")
{
    const ScenarioConfig cfg = test::small_config(2, 3, 4, 2, 1);
    const Layout layout(cfg);
    const int N = cfg.atoms_per_layer;
    const Eigen::VectorXd y = Eigen::VectorXd::Zero(cfg.total_atoms());
    Eigen::VectorXd yp = y;
    const int l = 1, n = 2;
    yp[l * N + n] = 0.4e-3;
    for (int q = 0; q < cfg.num_layers; ++q)
    {
        const Eigen::MatrixXcd a = build_omega(layout, q, y), b = build_omega(layout, q, yp);
        for (int r = 0; r < a.rows(); ++r)
            for (int c = 0; c < a.cols(); ++c)
            {
                const bool may_change = (q == l && r == n) || (q == l + 1 && c == n);
                if (may_change)
                    CHECK(a(r, c) != b(r, c));
                else
                    CHECK(a(r, c) == b(r, c));
            }
    }
}

TEST_CASE("user channel against the steering-vector reference", "[channel]")
{
    const ScenarioConfig cfg = test::small_config(2, 2, 6, 3, 3);
    const Layout layout(cfg);
    std::mt19937_64 rng(4);
    const Eigen::VectorXd y = test::random_feasible_y(rng, build_constraints(layout));
    const UserGeometry geom = sample_scenario(cfg, 17);
    for (int k = 0; k < cfg.num_users; ++k)
    {
        const Eigen::VectorXcd h = build_user_channel(layout, k, y, geom);
        CHECK(test::rel_diff(h, verify::user_channel_naive(cfg, k, y, geom)) < 1e-10);
    }
}

TEST_CASE("reference atom sums the path gains at rest", "[channel]")
{
    const ScenarioConfig cfg = test::small_config(2, 2, 4, 2, 2);
    const Layout layout(cfg);
    const UserGeometry geom = sample_scenario(cfg, 5);
    const Eigen::VectorXd y = Eigen::VectorXd::Zero(cfg.total_atoms());
    for (int k = 0; k < cfg.num_users; ++k)
    {
        cdouble sum = 0.0;
        for (const auto &p : geom.paths[k])
            sum += p.gain;
        CHECK(std::abs(build_user_channel(layout, k, y, geom)[0] - sum) < 1e-12 * std::abs(sum));
    }
}

TEST_CASE("zero azimuth removes the morphing dependence of the user channel", "[channel]")
{
    const ScenarioConfig cfg = test::small_config(2, 2, 4, 2, 1);
    const Layout layout(cfg);
    UserGeometry geom = sample_scenario(cfg, 6);
    for (auto &p : geom.paths[0])
        p.azimuth = 0.0;
    std::mt19937_64 rng(7);
    const Eigen::VectorXd y = test::random_feasible_y(rng, build_constraints(layout));
    const Eigen::VectorXd z = Eigen::VectorXd::Zero(cfg.total_atoms());
    CHECK(test::rel_diff(build_user_channel(layout, 0, y, geom), build_user_channel(layout, 0, z, geom)) < 1e-14);
    CHECK(build_user_channel_dy(layout, 0, y, geom).norm() == 0.0);
}

TEST_CASE("line-of-sight channel norm", "[channel]")
{
    ScenarioConfig cfg = test::small_config(2, 2, 9, 3, 1);
    cfg.num_paths = 1;
    const Layout layout(cfg);
    const UserGeometry geom = sample_scenario(cfg, 8);
    const Eigen::VectorXcd h = build_user_channel(layout, 0, Eigen::VectorXd::Zero(cfg.total_atoms()), geom);
    CHECK(h.norm() == Approx(std::abs(geom.paths[0][0].gain) * 3.0).epsilon(1e-12));
}

TEST_CASE("user channel derivative matches finite differences", "[channel]")
{
    const ScenarioConfig cfg = test::small_config(2, 2, 4, 2, 2);
    const Layout layout(cfg);
    const UserGeometry geom = sample_scenario(cfg, 9);
    const int N = cfg.atoms_per_layer, last = (cfg.num_layers - 1) * N;
    std::mt19937_64 rng(8);
    const Eigen::VectorXd y = test::random_feasible_y(rng, build_constraints(layout));
    const double h = 1e-7 * cfg.wavelength();
    for (int k = 0; k < cfg.num_users; ++k)
    {
        const Eigen::VectorXcd d = build_user_channel_dy(layout, k, y, geom);
        for (int n = 0; n < N; ++n)
        {
            Eigen::VectorXd yp = y, ym = y;
            yp[last + n] += h;
            ym[last + n] -= h;
            const cdouble fd =
                (build_user_channel(layout, k, yp, geom)[n] - build_user_channel(layout, k, ym, geom)[n]) / (2.0 * h);
            CHECK(std::abs(d[n] - fd) < 1e-5 * std::abs(d[n]) + 1e-20);
        }
    }
}

TEST_CASE("cascade against explicit path enumeration", "[channel]")
{
    const ScenarioConfig cfg = test::small_config(2, 3, 4, 2, 2);
    const Layout layout(cfg);
    std::mt19937_64 rng(10);
    const Eigen::VectorXd y = test::random_feasible_y(rng, build_constraints(layout));
    const UserGeometry geom = sample_scenario(cfg, 10);
    PhaseStack ph = PhaseStack::ones(cfg.total_atoms());
    ph.phi = test::random_unit(rng, cfg.total_atoms());
    const Eigen::MatrixXcd G = cascade(build_channels(layout, y, geom), ph);
    CHECK(test::rel_diff(G, verify::cascade_naive(cfg, y, geom, ph)) < 1e-10);
}

TEST_CASE("cascade evaluation order does not matter", "[channel]")
{
    const ScenarioConfig cfg = test::small_config(3, 4, 6, 3, 2);
    const Layout layout(cfg);
    const UserGeometry geom = sample_scenario(cfg, 11);
    std::mt19937_64 rng(11);
    const Eigen::VectorXd y = test::random_feasible_y(rng, build_constraints(layout));
    PhaseStack ph = PhaseStack::ones(cfg.total_atoms());
    ph.phi = test::random_unit(rng, cfg.total_atoms());
    const ChannelStack st = build_channels(layout, y, geom);
    const int N = cfg.atoms_per_layer;

    // Right to left: T = Phi_L Omega_L ... Phi_1 Omega_1 first, then h^T T.
    Eigen::MatrixXcd T = ph.layer(0, N).asDiagonal() * st.omega[0];
    for (int l = 1; l < cfg.num_layers; ++l)
        T = ph.layer(l, N).asDiagonal() * (st.omega[l] * T);
    Eigen::MatrixXcd G(cfg.num_users, cfg.num_tx_antennas);
    for (int k = 0; k < cfg.num_users; ++k)
        G.row(k) = st.user[k].transpose() * T;
    CHECK(test::rel_diff(G, cascade(st, ph)) < 1e-12);
}

TEST_CASE("single layer with unit responses", "[channel]")
{
    const ScenarioConfig cfg = test::small_config(3, 1, 4, 2, 2);
    const Layout layout(cfg);
    const UserGeometry geom = sample_scenario(cfg, 12);
    const ChannelStack st = build_channels(layout, Eigen::VectorXd::Zero(cfg.total_atoms()), geom);
    const Eigen::MatrixXcd G = cascade(st, PhaseStack::ones(cfg.total_atoms()));
    for (int k = 0; k < cfg.num_users; ++k)
        CHECK(test::rel_diff(G.row(k), st.user[k].transpose() * st.omega[0]) < 1e-14);
}

TEST_CASE("one atom per layer: a phase rotation rotates the whole channel", "[channel]")
{
    const ScenarioConfig cfg = test::small_config(2, 3, 1, 1, 1);
    const Layout layout(cfg);
    const UserGeometry geom = sample_scenario(cfg, 13);
    const ChannelStack st = build_channels(layout, Eigen::VectorXd::Zero(cfg.total_atoms()), geom);
    PhaseStack ph = PhaseStack::ones(cfg.total_atoms());
    const Eigen::MatrixXcd G0 = cascade(st, ph);
    const cdouble rot = std::polar(1.0, 0.9);
    ph.phi[1] *= rot;
    const Eigen::MatrixXcd G1 = cascade(st, ph);
    CHECK(test::rel_diff(G1, G0 * rot) < 1e-14);
    const Eigen::VectorXcd w = Eigen::Vector2cd(cdouble(0.3, 0.1), cdouble(-0.2, 0.5));
    CHECK(std::abs((G1 * w)(0)) == Approx(std::abs((G0 * w)(0))).epsilon(1e-13));
}

TEST_CASE("gap derivative matrices match finite differences", "[channel]")
{
    const ScenarioConfig cfg = test::small_config(2, 2, 4, 2, 1);
    const Layout layout(cfg);
    const int N = cfg.atoms_per_layer;
    const Eigen::VectorXd y = Eigen::VectorXd::Zero(cfg.total_atoms());
    const double h = 1e-7 * cfg.wavelength();
    // Raising receiving atom n of layer 1 lengthens every gap in row n.
    const Eigen::MatrixXcd D = build_omega_dgap(layout, 1, y);
    for (int n = 0; n < N; ++n)
    {
        Eigen::VectorXd yp = y, ym = y;
        yp[N + n] += h;
        ym[N + n] -= h;
        const Eigen::VectorXcd fd = (build_omega(layout, 1, yp).row(n) - build_omega(layout, 1, ym).row(n)) / (2 * h);
        CHECK((D.row(n).transpose() - fd).norm() < 1e-6 * fd.norm());
    }
}

TEST_CASE("propagation dump lists every entry", "[channel]")
{
    const ScenarioConfig cfg = test::small_config(2, 2, 4, 2, 1);
    const Layout layout(cfg);
    const ChannelStack st =
        build_channels(layout, Eigen::VectorXd::Zero(cfg.total_atoms()), sample_scenario(cfg, 1));
    std::ostringstream os;
    dump_omega(os, st);
    const std::string s = os.str();
    const auto lines = std::count(s.begin(), s.end(), '\n');
    CHECK(lines >= 4 * 2 + 4 * 4);
}
