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

#include "flexsim/verify/oracles.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace flexsim::verify
{

cdouble rs_entry_naive(double area, const Point3 &rx, const Point3 &tx, double wavelength)
{
    const double dx = rx.x - tx.x, dy = rx.y - tx.y, dz = rx.z - tx.z;
    const double d = std::sqrt(dx * dx + dy * dy + dz * dz);
    const double cos_t = dy / d;
    const cdouble j(0.0, 1.0);
    return area * cos_t / d * (1.0 / (2.0 * kPi * d) - j / wavelength) * std::exp(j * (2.0 * kPi * d / wavelength));
}

Point3 atom_position_naive(const ScenarioConfig &cfg, int layer, int atom, const Eigen::VectorXd &y)
{
    double plane = 0.0;
    for (int u = 0; u <= layer; ++u)
        plane += cfg.nominal_gaps[u];
    return {cfg.x_offset + cfg.atom_spacing_x * (atom % cfg.atoms_per_row),
            plane + y[layer * cfg.atoms_per_layer + atom],
            cfg.z_offset + cfg.atom_spacing_z * (atom / cfg.atoms_per_row)};
}

Point3 antenna_position_naive(const ScenarioConfig &cfg, int m) { return {0.0, 0.0, m * cfg.antenna_spacing}; }

Eigen::VectorXcd user_channel_naive(const ScenarioConfig &cfg, int user, const Eigen::VectorXd &y,
                                    const UserGeometry &geom)
{
    const int N = cfg.atoms_per_layer;
    const double lam = cfg.wavelength();
    const cdouble j(0.0, 1.0);
    Eigen::VectorXcd h = Eigen::VectorXcd::Zero(N);
    for (const auto &p : geom.paths[user])
        for (int u = 0; u < N; ++u)
        {
            const double psi = cfg.atom_spacing_x * (u % cfg.atoms_per_row) * std::cos(p.azimuth) *
                                   std::sin(p.elevation) +
                               cfg.atom_spacing_z * (u / cfg.atoms_per_row) * std::cos(p.elevation);
            const double ym = y[(cfg.num_layers - 1) * N + u];
            h[u] += p.gain * std::exp(j * 2.0 * kPi * (psi + ym * std::sin(p.azimuth) * std::sin(p.elevation)) / lam);
        }
    return h;
}

Eigen::MatrixXcd cascade_naive(const ScenarioConfig &cfg, const Eigen::VectorXd &y, const UserGeometry &geom,
                               const PhaseStack &phases)
{
    const int N = cfg.atoms_per_layer, L = cfg.num_layers, M = cfg.num_tx_antennas, K = cfg.num_users;
    const double lam = cfg.wavelength();

    auto omega = [&](int l, int n, int m) {
        if (l == 0)
            return rs_entry_naive(cfg.antenna_area, atom_position_naive(cfg, 0, n, y), antenna_position_naive(cfg, m),
                                  lam);
        return rs_entry_naive(cfg.atom_area, atom_position_naive(cfg, l, n, y), atom_position_naive(cfg, l - 1, m, y),
                              lam);
    };

    Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(K, M);
    std::vector<int> path(static_cast<size_t>(L));
    for (int k = 0; k < K; ++k)
    {
        const Eigen::VectorXcd h = user_channel_naive(cfg, k, y, geom);
        for (int m = 0; m < M; ++m)
        {
            // Enumerate atom sequences n_0 .. n_{L-1}.
            std::function<cdouble(int)> walk = [&](int l) -> cdouble {
                if (l == L)
                {
                    cdouble term = h[path[L - 1]];
                    for (int q = L - 1; q >= 0; --q)
                    {
                        term *= phases.phi[q * N + path[q]];
                        term *= q == 0 ? omega(0, path[0], m) : omega(q, path[q], path[q - 1]);
                    }
                    return term;
                }
                cdouble acc = 0.0;
                for (int n = 0; n < N; ++n)
                {
                    path[l] = n;
                    acc += walk(l + 1);
                }
                return acc;
            };
            G(k, m) = walk(0);
        }
    }
    return G;
}

void dense_constraints(const ConstraintSystem &cs, Eigen::MatrixXd &A, Eigen::VectorXd &b)
{
    const int n = cs.size();
    const int N = cs.atoms_per_layer;
    A = Eigen::MatrixXd::Zero(3 * n, n);
    b.resize(3 * n);
    for (int r = 0; r < n; ++r)
    {
        A(r, r) = 1.0; // y >= -range
        b[r] = -cs.morph_range;
        A(n + r, r) = -1.0; // -y >= -range
        b[n + r] = -cs.morph_range;
        A(2 * n + r, r) = 1.0; // difference rows
        if (r >= N)
            A(2 * n + r, r - N) = -1.0;
        b[2 * n + r] = cs.zeta[r];
    }
}

namespace
{

// Connected blocks of variables linked through shared rows.
std::vector<std::vector<int>> variable_blocks(const Eigen::MatrixXd &A)
{
    const int n = static_cast<int>(A.cols());
    std::vector<int> parent(n);
    for (int i = 0; i < n; ++i)
        parent[i] = i;
    std::function<int(int)> find = [&](int i) { return parent[i] == i ? i : parent[i] = find(parent[i]); };
    for (Eigen::Index r = 0; r < A.rows(); ++r)
    {
        int first = -1;
        for (int c = 0; c < n; ++c)
            if (A(r, c) != 0.0)
            {
                if (first < 0)
                    first = c;
                else
                    parent[find(c)] = find(first);
            }
    }
    std::vector<std::vector<int>> blocks;
    std::vector<int> id(n, -1);
    for (int i = 0; i < n; ++i)
    {
        const int root = find(i);
        if (id[root] < 0)
        {
            id[root] = static_cast<int>(blocks.size());
            blocks.emplace_back();
        }
        blocks[id[root]].push_back(i);
    }
    return blocks;
}

} // namespace

Eigen::VectorXd brute_force_qp(const Eigen::VectorXd &v, const Eigen::MatrixXd &A, const Eigen::VectorXd &b)
{
    const double tol = 1e-10;
    Eigen::VectorXd out = v;
    for (const auto &blk : variable_blocks(A))
    {
        const int d = static_cast<int>(blk.size());
        std::vector<int> rows;
        for (Eigen::Index r = 0; r < A.rows(); ++r)
            for (int c : blk)
                if (A(r, c) != 0.0)
                {
                    rows.push_back(static_cast<int>(r));
                    break;
                }
        const int m = static_cast<int>(rows.size());
        Eigen::MatrixXd Ab(m, d);
        Eigen::VectorXd bb(m), vb(d);
        for (int i = 0; i < m; ++i)
        {
            for (int j = 0; j < d; ++j)
                Ab(i, j) = A(rows[i], blk[j]);
            bb[i] = b[rows[i]];
        }
        for (int j = 0; j < d; ++j)
            vb[j] = v[blk[j]];

        double best = std::numeric_limits<double>::infinity();
        Eigen::VectorXd best_y;
        std::vector<int> active;
        std::function<void(int)> enumerate = [&](int start) {
            // Evaluate the current active set.
            const int k = static_cast<int>(active.size());
            Eigen::VectorXd y = vb;
            bool ok = true;
            if (k > 0)
            {
                Eigen::MatrixXd As(k, d);
                Eigen::VectorXd bs(k);
                for (int i = 0; i < k; ++i)
                {
                    As.row(i) = Ab.row(active[i]);
                    bs[i] = bb[active[i]];
                }
                const Eigen::MatrixXd gram = As * As.transpose();
                Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
                if (lu.rank() < k)
                    ok = false;
                else
                {
                    const Eigen::VectorXd lambda = lu.solve(bs - As * vb);
                    if (lambda.minCoeff() < -tol)
                        ok = false;
                    y = vb + As.transpose() * lambda;
                }
            }
            if (ok && (Ab * y - bb).minCoeff() >= -tol)
            {
                const double f = (y - vb).squaredNorm();
                if (f < best)
                {
                    best = f;
                    best_y = y;
                }
            }
            if (k == d)
                return;
            for (int r = start; r < m; ++r)
            {
                active.push_back(r);
                enumerate(r + 1);
                active.pop_back();
            }
        };
        enumerate(0);
        if (!std::isfinite(best))
            throw std::runtime_error("no KKT point found");
        for (int j = 0; j < d; ++j)
            out[blk[j]] = best_y[j];
    }
    return out;
}

ExhaustiveResult exhaustive_discrete(const LayerSurrogate &sur, const std::vector<cdouble> &alphabet,
                                     const Eigen::VectorXd &thresholds, const std::vector<double> &noise)
{
    const int N = sur.N();
    const int K = sur.K();
    const int U = static_cast<int>(alphabet.size());
    ExhaustiveResult best{-std::numeric_limits<double>::infinity(), {}};
    std::vector<int> idx(static_cast<size_t>(N), 0);
    long long total = 1;
    for (int n = 0; n < N; ++n)
        total *= U;
    for (long long code = 0; code < total; ++code)
    {
        long long c = code;
        Eigen::VectorXcd phi(N);
        for (int n = 0; n < N; ++n)
        {
            idx[n] = static_cast<int>(c % U);
            c /= U;
            phi[n] = alphabet[idx[n]];
        }
        // Rates from scratch, one user at a time.
        double sum = 0.0;
        bool ok = true;
        for (int k = 0; k < K; ++k)
        {
            double desired = 0.0, interf = noise[k];
            for (int i = 0; i < K; ++i)
            {
                cdouble s = 0.0;
                for (int n = 0; n < N; ++n)
                    s += sur.g_eff[k][n] * phi[n] * sur.w_eff[i][n];
                (i == k ? desired : interf) += std::norm(s);
            }
            const double r = std::log2(1.0 + desired / interf);
            if (thresholds.size() == K && r < thresholds[k] - 1e-12)
                ok = false;
            sum += r;
        }
        if (ok && sum > best.sum_rate)
            best = {sum, idx};
    }
    return best;
}

double mrt_rate(const Eigen::VectorXcd &g, double power, double noise)
{
    return std::log2(1.0 + power * g.squaredNorm() / noise);
}

} // namespace flexsim::verify
