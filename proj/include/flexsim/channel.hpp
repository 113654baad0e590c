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

#pragma once

#include "flexsim/geometry.hpp"
#include "flexsim/scenario.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <vector>

namespace flexsim
{

// Quantization alphabet exp(j 2 pi u / U), u = 0..U-1. Index 0 is 1.
std::vector<cdouble> quantization_set(int bits);

// Per-layer diagonal responses, stacked layer-major like MorphState. In
// quantized form the alphabet indices are authoritative and the complex
// values are derived from them.
struct PhaseStack
{
    Eigen::VectorXcd phi;
    std::vector<int> index; // empty in continuous form
    std::vector<cdouble> alphabet;

    static PhaseStack ones(int total_atoms);
    static PhaseStack ones_quantized(int total_atoms, int bits);

    bool quantized() const { return !index.empty(); }
    void set_index(int pos, int u);
    Eigen::Ref<const Eigen::VectorXcd> layer(int l, int atoms_per_layer) const
    {
        return phi.segment(static_cast<Eigen::Index>(l) * atoms_per_layer, atoms_per_layer);
    }
    // Largest | |phi| - 1 | over all entries.
    double max_modulus_error() const;
};

// Rayleigh-Sommerfeld coefficient and its derivative with respect to the
// axial gap, for in-plane squared offset rho.
struct RsCoefficient
{
    cdouble value;
    cdouble d_gap;
};
RsCoefficient rs_coefficient(double area, double rho, double gap, double wavelength);

// exp(j 2 pi cycles) with the integer part removed first.
cdouble unit_phasor_cycles(double cycles);

struct ChannelStack
{
    std::vector<Eigen::MatrixXcd> omega;     // omega[0]: N x M, omega[l]: N x N
    std::vector<Eigen::VectorXcd> user;      // h_k, length N
    std::vector<Eigen::VectorXcd> user_dy;   // d h_k[n] / d y_n of the final layer
    std::vector<Eigen::MatrixXcd> omega_dgap; // element-wise derivative w.r.t. the gap
};

// Inter-layer propagation matrix of layer l (zero-based; l == 0 is the
// antenna-to-first-layer channel).
Eigen::MatrixXcd build_omega(const Layout &layout, int layer, const Eigen::VectorXd &y);
Eigen::MatrixXcd build_omega_dgap(const Layout &layout, int layer, const Eigen::VectorXd &y);

// Multipath channel from the final layer to user k.
Eigen::VectorXcd build_user_channel(const Layout &layout, int user, const Eigen::VectorXd &y, const UserGeometry &geom);
Eigen::VectorXcd build_user_channel_dy(const Layout &layout, int user, const Eigen::VectorXd &y,
                                       const UserGeometry &geom);

// Rebuilds every matrix for the given morphing vector. Derivatives are
// filled only when with_derivatives is set.
ChannelStack build_channels(const Layout &layout, const Eigen::VectorXd &y, const UserGeometry &geom,
                            bool with_derivatives = false);

// Cascaded channels as rows: G.row(k) = h_k^T Phi_L Omega_L ... Phi_1 Omega_1.
Eigen::MatrixXcd cascade(const ChannelStack &stack, const PhaseStack &phases);

// Writes "layer,row,col,re,im" lines for every Omega entry.
void dump_omega(std::ostream &os, const ChannelStack &stack);

} // namespace flexsim
