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

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace flexsim
{

std::vector<cdouble> quantization_set(int bits)
{
    if (bits < 1 || bits > 16)
        throw std::invalid_argument("quantization bits must lie in [1, 16]");
    const int U = 1 << bits;
    std::vector<cdouble> q(static_cast<size_t>(U));
    q[0] = 1.0;
    for (int u = 1; u < U; ++u)
        q[u] = unit_phasor_cycles(static_cast<double>(u) / U);
    return q;
}

PhaseStack PhaseStack::ones(int total_atoms)
{
    PhaseStack p;
    p.phi = Eigen::VectorXcd::Ones(total_atoms);
    return p;
}

PhaseStack PhaseStack::ones_quantized(int total_atoms, int bits)
{
    PhaseStack p;
    p.alphabet = quantization_set(bits);
    p.index.assign(static_cast<size_t>(total_atoms), 0);
    p.phi = Eigen::VectorXcd::Ones(total_atoms);
    return p;
}

void PhaseStack::set_index(int pos, int u)
{
    if (u < 0 || u >= static_cast<int>(alphabet.size()))
        throw std::out_of_range("alphabet index out of range");
    index[pos] = u;
    phi[pos] = alphabet[u];
}

double PhaseStack::max_modulus_error() const
{
    double e = 0.0;
    for (Eigen::Index i = 0; i < phi.size(); ++i)
        e = std::max(e, std::abs(std::abs(phi[i]) - 1.0));
    return e;
}

cdouble unit_phasor_cycles(double cycles)
{
    const double frac = cycles - std::floor(cycles);
    const double a = 2.0 * kPi * frac;
    return {std::cos(a), std::sin(a)};
}

RsCoefficient rs_coefficient(double area, double rho, double gap, double wavelength)
{
    const double d2 = rho + gap * gap;
    const double d = std::sqrt(d2);
    if (!(d > 0.0))
        throw std::domain_error("zero propagation distance");
    const double p = area * gap / d2;
    const cdouble q(1.0 / (2.0 * kPi * d), -1.0 / wavelength);
    const cdouble r = unit_phasor_cycles(d / wavelength);

    const double dp = area * (rho - gap * gap) / (d2 * d2);
    const cdouble dq(-gap / (2.0 * kPi * d2 * d), 0.0);
    const cdouble dr = cdouble(0.0, 2.0 * kPi * gap / (wavelength * d)) * r;

    RsCoefficient c;
    c.value = p * q * r;
    c.d_gap = dp * q * r + p * dq * r + p * q * dr;
    return c;
}

namespace
{

template <bool Derivative>
Eigen::MatrixXcd omega_impl(const Layout &layout, int layer, const Eigen::VectorXd &y)
{
    const auto &cfg = layout.config();
    const int N = layout.N();
    const int cols = layer == 0 ? layout.M() : N;
    const double area = layer == 0 ? cfg.antenna_area : cfg.atom_area;
    const Eigen::MatrixXd &rho = layer == 0 ? layout.rho_first() : layout.rho_inter();
    const double lam = layout.wavelength();

    Eigen::MatrixXcd out(N, cols);
    for (int m = 0; m < cols; ++m)
        for (int n = 0; n < N; ++n)
        {
            const RsCoefficient c = rs_coefficient(area, rho(n, m), layout.gap(layer, n, m, y), lam);
            out(n, m) = Derivative ? c.d_gap : c.value;
        }
    return out;
}

template <bool Derivative>
Eigen::VectorXcd user_impl(const Layout &layout, int user, const Eigen::VectorXd &y, const UserGeometry &geom)
{
    const auto &cfg = layout.config();
    const int N = layout.N();
    const int nx = cfg.atoms_per_row;
    const int last = (layout.L() - 1) * N;
    const double lam = layout.wavelength();

    Eigen::VectorXcd h = Eigen::VectorXcd::Zero(N);
    for (const PathGeometry &p : geom.paths.at(static_cast<size_t>(user)))
    {
        const double st = std::sin(p.azimuth), ct = std::cos(p.azimuth);
        const double sp = std::sin(p.elevation), cp = std::cos(p.elevation);
        const double axial = st * sp;
        for (int u = 0; u < N; ++u)
        {
            const double psi = cfg.atom_spacing_x * (u % nx) * ct * sp + cfg.atom_spacing_z * (u / nx) * cp;
            const cdouble a = unit_phasor_cycles((psi + y[last + u] * axial) / lam);
            if (Derivative)
                h[u] += p.gain * cdouble(0.0, 2.0 * kPi * axial / lam) * a;
            else
                h[u] += p.gain * a;
        }
    }
    return h;
}

} // namespace

Eigen::MatrixXcd build_omega(const Layout &layout, int layer, const Eigen::VectorXd &y)
{
    return omega_impl<false>(layout, layer, y);
}

Eigen::MatrixXcd build_omega_dgap(const Layout &layout, int layer, const Eigen::VectorXd &y)
{
    return omega_impl<true>(layout, layer, y);
}

Eigen::VectorXcd build_user_channel(const Layout &layout, int user, const Eigen::VectorXd &y, const UserGeometry &geom)
{
    return user_impl<false>(layout, user, y, geom);
}

Eigen::VectorXcd build_user_channel_dy(const Layout &layout, int user, const Eigen::VectorXd &y,
                                       const UserGeometry &geom)
{
    return user_impl<true>(layout, user, y, geom);
}

ChannelStack build_channels(const Layout &layout, const Eigen::VectorXd &y, const UserGeometry &geom,
                            bool with_derivatives)
{
    if (y.size() != layout.N() * layout.L())
        throw std::invalid_argument("morphing vector has the wrong size");
    if (geom.num_users() != layout.K())
        throw std::invalid_argument("geometry and configuration disagree on the number of users");

    ChannelStack s;
    const int L = layout.L();
    s.omega.reserve(L);
    for (int l = 0; l < L; ++l)
        s.omega.push_back(build_omega(layout, l, y));
    for (int k = 0; k < layout.K(); ++k)
        s.user.push_back(build_user_channel(layout, k, y, geom));
    if (with_derivatives)
    {
        for (int l = 0; l < L; ++l)
            s.omega_dgap.push_back(build_omega_dgap(layout, l, y));
        for (int k = 0; k < layout.K(); ++k)
            s.user_dy.push_back(build_user_channel_dy(layout, k, y, geom));
    }
    return s;
}

Eigen::MatrixXcd cascade(const ChannelStack &stack, const PhaseStack &phases)
{
    const int L = static_cast<int>(stack.omega.size());
    if (L == 0)
        throw std::invalid_argument("empty channel stack");
    const int N = static_cast<int>(stack.omega[0].rows());
    const int M = static_cast<int>(stack.omega[0].cols());
    if (phases.phi.size() != static_cast<Eigen::Index>(N) * L)
        throw std::invalid_argument("phase stack size does not match the channel stack");

    const int K = static_cast<int>(stack.user.size());
    Eigen::MatrixXcd G(K, M);
    for (int k = 0; k < K; ++k)
    {
        Eigen::VectorXcd v = stack.user[k];
        for (int l = L - 1; l >= 0; --l)
            v = stack.omega[l].transpose() * phases.layer(l, N).cwiseProduct(v);
        G.row(k) = v.transpose();
    }
    return G;
}

void dump_omega(std::ostream &os, const ChannelStack &stack)
{
    os << "layer,row,col,re,im\n";
    os.precision(17);
    for (size_t l = 0; l < stack.omega.size(); ++l)
    {
        const auto &O = stack.omega[l];
        for (Eigen::Index n = 0; n < O.rows(); ++n)
            for (Eigen::Index m = 0; m < O.cols(); ++m)
                os << l + 1 << ',' << n + 1 << ',' << m + 1 << ',' << O(n, m).real() << ',' << O(n, m).imag()
                   << '\n';
    }
}

} // namespace flexsim
