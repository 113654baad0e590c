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

#include "flexsim/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace flexsim
{

MorphState MorphState::zeros(const ScenarioConfig &cfg, Architecture mode)
{
    MorphState s;
    s.y = Eigen::VectorXd::Zero(cfg.total_atoms());
    s.mode = mode;
    return s;
}

Layout::Layout(const ScenarioConfig &cfg) : cfg_(cfg), lambda_(cfg.wavelength())
{
    cfg_.validate();
    const int N = cfg_.atoms_per_layer;
    const int M = cfg_.num_tx_antennas;
    const int nx = cfg_.atoms_per_row;

    atom_x_.resize(static_cast<size_t>(N));
    atom_z_.resize(static_cast<size_t>(N));
    for (int n = 0; n < N; ++n)
    {
        atom_x_[n] = cfg_.x_offset + cfg_.atom_spacing_x * (n % nx);
        atom_z_[n] = cfg_.z_offset + cfg_.atom_spacing_z * (n / nx);
    }

    plane_y_.resize(static_cast<size_t>(cfg_.num_layers));
    double acc = 0.0;
    for (int l = 0; l < cfg_.num_layers; ++l)
    {
        acc += cfg_.nominal_gaps[l];
        plane_y_[l] = acc;
    }

    rho_first_.resize(N, M);
    for (int n = 0; n < N; ++n)
        for (int m = 0; m < M; ++m)
        {
            const double dx = atom_x_[n];
            const double dz = atom_z_[n] - antenna_z(m);
            rho_first_(n, m) = dx * dx + dz * dz;
        }

    rho_inter_.resize(N, N);
    for (int n = 0; n < N; ++n)
        for (int m = 0; m < N; ++m)
        {
            const double dx = atom_x_[n] - atom_x_[m];
            const double dz = atom_z_[n] - atom_z_[m];
            rho_inter_(n, m) = dx * dx + dz * dz;
        }
}

double Layout::gap(int layer, int n, int m, const Eigen::VectorXd &y) const
{
    const int N = cfg_.atoms_per_layer;
    if (layer == 0)
        return cfg_.nominal_gaps[0] + y[n];
    return cfg_.nominal_gaps[layer] + y[layer * N + n] - y[(layer - 1) * N + m];
}

Point3 atom_coords(const Layout &layout, int layer, int n, const Eigen::VectorXd &y)
{
    if (layer < 0 || layer >= layout.L() || n < 0 || n >= layout.N())
        throw std::out_of_range("atom index out of range");
    return {layout.atom_x(n), layout.plane_y(layer) + y[layer * layout.N() + n], layout.atom_z(n)};
}

DistanceCos distance_and_cos(const Layout &layout, int layer, int n, int m, const Eigen::VectorXd &y)
{
    const double rho = layer == 0 ? layout.rho_first()(n, m) : layout.rho_inter()(n, m);
    const double g = layout.gap(layer, n, m, y);
    const double d = std::sqrt(rho + g * g);
    return {d, g / d};
}

Eigen::MatrixXd ConstraintSystem::delta_matrix() const
{
    const int n = size();
    Eigen::MatrixXd D = Eigen::MatrixXd::Identity(n, n);
    for (int r = atoms_per_layer; r < n; ++r)
        D(r, r - atoms_per_layer) = -1.0;
    return D;
}

Eigen::VectorXd ConstraintSystem::apply_delta(const Eigen::VectorXd &y) const
{
    Eigen::VectorXd out = y;
    const int n = size();
    for (int r = atoms_per_layer; r < n; ++r)
        out[r] -= y[r - atoms_per_layer];
    return out;
}

double ConstraintSystem::max_violation(const Eigen::VectorXd &y) const
{
    const Eigen::VectorXd dy = apply_delta(y);
    double v = 0.0;
    for (int r = 0; r < size(); ++r)
    {
        v = std::max(v, std::abs(y[r]) - morph_range);
        v = std::max(v, zeta[r] - dy[r]);
    }
    return v;
}

ConstraintSystem build_constraints(const Layout &layout)
{
    const auto &cfg = layout.config();
    const int N = layout.N();
    const int L = layout.L();
    const double eps2 = cfg.min_distance * cfg.min_distance;

    ConstraintSystem cs;
    cs.num_layers = L;
    cs.atoms_per_layer = N;
    cs.morph_range = cfg.morph_range;
    cs.zeta.resize(N * L);
    for (int n = 0; n < N; ++n)
    {
        const double rho_min = layout.rho_first().row(n).minCoeff();
        cs.zeta[n] = std::sqrt(std::max(0.0, eps2 - rho_min)) - cfg.nominal_gaps[0];
    }
    for (int l = 1; l < L; ++l)
        for (int n = 0; n < N; ++n)
            cs.zeta[l * N + n] = std::sqrt(std::max(0.0, eps2 - layout.rho_inter()(n, n))) - cfg.nominal_gaps[l];
    return cs;
}

namespace
{

// Isotonic regression with per-element bounds lo <= u <= hi (both
// non-decreasing). Each block takes the clamped mean of its members; blocks
// merge while their values decrease.
Eigen::VectorXd bounded_pava(const Eigen::VectorXd &v, const Eigen::VectorXd &lo, const Eigen::VectorXd &hi)
{
    struct Block
    {
        double sum;
        int count;
        double lo, hi;
        double value() const { return std::clamp(sum / count, lo, std::max(lo, hi)); }
    };
    const int n = static_cast<int>(v.size());
    std::vector<Block> blocks;
    blocks.reserve(n);
    for (int i = 0; i < n; ++i)
    {
        blocks.push_back({v[i], 1, lo[i], hi[i]});
        while (blocks.size() > 1 && blocks[blocks.size() - 2].value() > blocks.back().value())
        {
            const Block b = blocks.back();
            blocks.pop_back();
            Block &a = blocks.back();
            a.sum += b.sum;
            a.count += b.count;
            a.lo = std::max(a.lo, b.lo);
            a.hi = std::min(a.hi, b.hi);
        }
    }
    Eigen::VectorXd out(n);
    int pos = 0;
    for (const auto &b : blocks)
        for (int c = 0; c < b.count; ++c)
            out[pos++] = b.value();
    return out;
}

// min ||v - target||^2  s.t.  v_0 >= zeta_0,  v_l - v_{l-1} >= zeta_l,  lo <= v <= hi.
//
// With u_l = v_l - Z_l, Z_l = zeta_1 + ... + zeta_l, the difference constraints
// become u non-decreasing. Bounds on a monotone sequence can be replaced by
// their running max (lower) and reverse running min (upper), which makes
// them monotone as well.
Eigen::VectorXd solve_chain(const Eigen::VectorXd &target, const Eigen::VectorXd &zeta, const Eigen::VectorXd &lo,
                            const Eigen::VectorXd &hi)
{
    const int L = static_cast<int>(target.size());
    Eigen::VectorXd Z(L);
    Z[0] = 0.0;
    for (int l = 1; l < L; ++l)
        Z[l] = Z[l - 1] + zeta[l];

    Eigen::VectorXd lo_u(L), hi_u(L);
    for (int l = 0; l < L; ++l)
    {
        lo_u[l] = lo[l] - Z[l];
        hi_u[l] = hi[l] - Z[l];
    }
    lo_u[0] = std::max(lo_u[0], zeta[0]);
    for (int l = 1; l < L; ++l)
        lo_u[l] = std::max(lo_u[l], lo_u[l - 1]);
    for (int l = L - 2; l >= 0; --l)
        hi_u[l] = std::min(hi_u[l], hi_u[l + 1]);

    for (int l = 0; l < L; ++l)
        if (lo_u[l] > hi_u[l] + 1e-15)
            throw InfeasibleConstraintsError("morphing constraints are infeasible (layer " + std::to_string(l + 1) +
                                             ")");

    return bounded_pava(target - Z, lo_u, hi_u) + Z;
}

bool is_interior_layer(int l, int L) { return l > 0 && l < L - 1; }

} // namespace

Eigen::VectorXd project_feasible(const Eigen::VectorXd &y_raw, const ConstraintSystem &cs)
{
    if (cs.max_violation(y_raw) == 0.0)
        return y_raw;
    return project_feasible_mode(y_raw, cs, Architecture::SFIM);
}

Eigen::VectorXd project_mode(const Eigen::VectorXd &y, Architecture mode, int num_layers, int atoms_per_layer)
{
    Eigen::VectorXd out = y;
    const int N = atoms_per_layer;
    switch (mode)
    {
    case Architecture::SFIM:
        break;
    case Architecture::RSIM:
        out.setZero();
        break;
    case Architecture::HSIM:
        for (int l = 0; l < num_layers; ++l)
            if (is_interior_layer(l, num_layers))
                out.segment(l * N, N).setZero();
        break;
    case Architecture::DSIM:
        for (int l = 0; l < num_layers; ++l)
            out.segment(l * N, N).setConstant(y.segment(l * N, N).mean());
        break;
    }
    return out;
}

Eigen::VectorXd project_feasible_mode(const Eigen::VectorXd &y_raw, const ConstraintSystem &cs, Architecture mode)
{
    const int L = cs.num_layers;
    const int N = cs.atoms_per_layer;
    if (y_raw.size() != cs.size())
        throw std::invalid_argument("morphing vector has the wrong size");
    const double r = cs.morph_range;

    Eigen::VectorXd out(cs.size());
    Eigen::VectorXd target(L), zeta(L), lo(L), hi(L);

    if (mode == Architecture::DSIM)
    {
        // Equal per-layer displacement: fit the layer means under the
        // tightest difference constraint of each layer.
        for (int l = 0; l < L; ++l)
        {
            target[l] = y_raw.segment(l * N, N).mean();
            zeta[l] = cs.zeta.segment(l * N, N).maxCoeff();
            lo[l] = -r;
            hi[l] = r;
        }
        const Eigen::VectorXd c = solve_chain(target, zeta, lo, hi);
        for (int l = 0; l < L; ++l)
            out.segment(l * N, N).setConstant(c[l]);
        return out;
    }

    for (int n = 0; n < N; ++n)
    {
        for (int l = 0; l < L; ++l)
        {
            target[l] = y_raw[l * N + n];
            zeta[l] = cs.zeta[l * N + n];
            const bool pinned = mode == Architecture::RSIM || (mode == Architecture::HSIM && is_interior_layer(l, L));
            lo[l] = pinned ? 0.0 : -r;
            hi[l] = pinned ? 0.0 : r;
        }
        const Eigen::VectorXd v = solve_chain(target, zeta, lo, hi);
        for (int l = 0; l < L; ++l)
            out[l * N + n] = v[l];
    }
    return out;
}

} // namespace flexsim
