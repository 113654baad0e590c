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

#include "flexsim/scenario.hpp"

#include <Eigen/Dense>

#include <stdexcept>

namespace flexsim
{

// Stacked morphing vector. Entry (layer, atom) lives at layer * N + atom
// (zero-based), so the vector is layer-major as the optimizer sees it.
struct MorphState
{
    Eigen::VectorXd y;
    Architecture mode = Architecture::SFIM;

    static MorphState zeros(const ScenarioConfig &cfg, Architecture mode);

    double &at(int layer, int atom, int atoms_per_layer) { return y[layer * atoms_per_layer + atom]; }
    double at(int layer, int atom, int atoms_per_layer) const { return y[layer * atoms_per_layer + atom]; }
};

struct Point3
{
    double x, y, z;
};

struct DistanceCos
{
    double distance;
    double cos_theta;
};

// Fixed, morphing-independent part of the geometry: atom grid, antenna
// positions and the in-plane squared offsets rho between consecutive planes.
class Layout
{
public:
    explicit Layout(const ScenarioConfig &cfg);

    const ScenarioConfig &config() const { return cfg_; }
    double wavelength() const { return lambda_; }
    int M() const { return cfg_.num_tx_antennas; }
    int L() const { return cfg_.num_layers; }
    int N() const { return cfg_.atoms_per_layer; }
    int K() const { return cfg_.num_users; }

    // In-plane (x, z) position of atom n; identical for every layer.
    double atom_x(int n) const { return atom_x_[n]; }
    double atom_z(int n) const { return atom_z_[n]; }
    double antenna_z(int m) const { return m * cfg_.antenna_spacing; }

    // Axial position of the rigid-equivalent plane of layer l.
    double plane_y(int layer) const { return plane_y_[layer]; }

    // rho between receiving atom n of the first layer and antenna m.
    const Eigen::MatrixXd &rho_first() const { return rho_first_; }
    // rho between receiving atom n and transmitting atom m of adjacent layers.
    const Eigen::MatrixXd &rho_inter() const { return rho_inter_; }

    // Axial gap between receiving atom n of layer l and its transmitter m
    // (antenna m when l == 0).
    double gap(int layer, int n, int m, const Eigen::VectorXd &y) const;

private:
    ScenarioConfig cfg_;
    double lambda_;
    std::vector<double> atom_x_, atom_z_, plane_y_;
    Eigen::MatrixXd rho_first_, rho_inter_;
};

// Global coordinates of atom n of layer l. The transmit array sits on the
// z-axis at y = 0.
Point3 atom_coords(const Layout &layout, int layer, int n, const Eigen::VectorXd &y);

// Distance and obliquity cosine between receiving atom n of layer l and the
// transmitting element m (antenna when l == 0, else atom of layer l - 1).
// The cosine follows the morphed axial gap.
DistanceCos distance_and_cos(const Layout &layout, int layer, int n, int m, const Eigen::VectorXd &y);

// Box plus minimum-distance constraints in the form  zeta <= Delta y.
// Row r = l * N + n of Delta is e_r for the first layer and e_r - e_{r-N}
// afterwards, so Delta is stored implicitly through this layout.
struct ConstraintSystem
{
    int num_layers = 0;
    int atoms_per_layer = 0;
    double morph_range = 0.0;
    Eigen::VectorXd zeta;

    int size() const { return num_layers * atoms_per_layer; }
    Eigen::MatrixXd delta_matrix() const;
    Eigen::VectorXd apply_delta(const Eigen::VectorXd &y) const;

    // Largest violation over box and difference constraints (0 when feasible).
    double max_violation(const Eigen::VectorXd &y) const;
};

class InfeasibleConstraintsError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

ConstraintSystem build_constraints(const Layout &layout);

// Euclidean projection onto { |y| <= morph_range, Delta y >= zeta }.
// Throws InfeasibleConstraintsError if the set is empty.
Eigen::VectorXd project_feasible(const Eigen::VectorXd &y_raw, const ConstraintSystem &cs);

// Architecture pattern: DSIM layer means, HSIM zeroes interior layers, RSIM
// zeroes everything, SFIM is the identity.
Eigen::VectorXd project_mode(const Eigen::VectorXd &y, Architecture mode, int num_layers, int atoms_per_layer);

// Exact projection onto the feasible set intersected with the architecture
// pattern. Equals project_mode(project_feasible(.)) whenever that composition
// is already feasible.
Eigen::VectorXd project_feasible_mode(const Eigen::VectorXd &y_raw, const ConstraintSystem &cs, Architecture mode);

} // namespace flexsim
