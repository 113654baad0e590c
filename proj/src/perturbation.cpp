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

#include "flexsim/perturbation.hpp"

#include "flexsim/gradients.hpp"

#include <cmath>

namespace flexsim
{

namespace
{

void require_siso(const ScenarioConfig &cfg)
{
    if (cfg.num_tx_antennas != 1 || cfg.num_users != 1)
        throw std::invalid_argument("first-order analysis needs one transmit antenna and one user");
}

} // namespace

double received_power(const Layout &layout, const UserGeometry &geom, const PhaseStack &phases, double tx_power,
                      const Eigen::VectorXd &y)
{
    const Eigen::MatrixXcd G = cascade(build_channels(layout, y, geom), phases);
    return tx_power * std::norm(G(0, 0));
}

void gains_from_gradient(const Eigen::VectorXd &grad, int num_layers, int atoms_per_layer, double morph_range,
                         double &gain_sfim, double &gain_dsim, Eigen::VectorXd *y_sfim, Eigen::VectorXd *y_dsim)
{
    const int N = atoms_per_layer;
    gain_sfim = morph_range * grad.lpNorm<1>();
    gain_dsim = 0.0;
    if (y_sfim)
    {
        y_sfim->resize(grad.size());
        for (Eigen::Index i = 0; i < grad.size(); ++i)
            (*y_sfim)[i] = morph_range * sign_pos(grad[i]);
    }
    if (y_dsim)
        y_dsim->resize(grad.size());
    for (int l = 0; l < num_layers; ++l)
    {
        const double s = grad.segment(l * N, N).sum();
        gain_dsim += morph_range * std::abs(s);
        if (y_dsim)
            y_dsim->segment(l * N, N).setConstant(morph_range * sign_pos(s));
    }
}

PerturbReport perturb_gains(const ScenarioConfig &cfg, const UserGeometry &geom, const PhaseStack &phases,
                            double morph_range)
{
    require_siso(cfg);
    const Layout layout(cfg);
    const Eigen::VectorXd y0 = Eigen::VectorXd::Zero(cfg.total_atoms());
    const ChannelStack stack = build_channels(layout, y0, geom, true);
    const Precoder W = Precoder::Constant(1, 1, cdouble(std::sqrt(cfg.power_budget), 0.0));
    GradWorkspace ws = make_workspace(stack, phases, W);
    compute_product_derivatives(ws, stack);

    PerturbReport r;
    r.power0 = std::norm(ws.products(0, 0));
    r.gradient = grad_J(ws, 0, 0);
    r.morph_range = morph_range;
    gains_from_gradient(r.gradient, cfg.num_layers, cfg.atoms_per_layer, morph_range, r.gain_sfim, r.gain_dsim,
                        &r.y_sfim, &r.y_dsim);
    r.actual_sfim = received_power(layout, geom, phases, cfg.power_budget, r.y_sfim) - r.power0;
    r.actual_dsim = received_power(layout, geom, phases, cfg.power_budget, r.y_dsim) - r.power0;
    return r;
}

std::vector<ValidationRow> first_order_validate(const ScenarioConfig &cfg, const UserGeometry &geom,
                                                const PhaseStack &phases, const PerturbReport &report,
                                                const std::vector<double> &ranges)
{
    require_siso(cfg);
    const Layout layout(cfg);
    std::vector<ValidationRow> rows;
    rows.reserve(ranges.size());
    for (double r : ranges)
    {
        if (!(r >= 0.0))
            throw std::invalid_argument("morphing range must be non-negative");
        ValidationRow row{};
        row.morph_range = r;
        Eigen::VectorXd ys, yd;
        gains_from_gradient(report.gradient, cfg.num_layers, cfg.atoms_per_layer, r, row.gain_sfim, row.gain_dsim,
                            &ys, &yd);
        if (ys.size() && ys.lpNorm<Eigen::Infinity>() > r * (1.0 + 1e-12))
            throw std::logic_error("displacement outside the morphing range");
        row.predicted = row.gain_sfim;
        row.actual = received_power(layout, geom, phases, cfg.power_budget, ys) - report.power0;
        row.actual_dsim = received_power(layout, geom, phases, cfg.power_budget, yd) - report.power0;
        row.rel_error = row.actual != 0.0 ? std::abs(row.predicted - row.actual) / std::abs(row.actual)
                                          : (row.predicted == 0.0 ? 0.0 : INFINITY);
        rows.push_back(row);
    }
    return rows;
}

} // namespace flexsim
