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

#include "flexsim/rate_sca.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace flexsim
{

namespace
{

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kLn2 = std::log(2.0);

// The surrogate in real coordinates z = [Re x; Im x].
struct Model
{
    int K = 0;
    int n = 0;
    int dim = 0;
    RateScaProblem::Region region = RateScaProblem::Region::Ball;
    double radius2 = 1.0;

    std::vector<Eigen::MatrixXd> P;     // interference quadratic of user k
    std::vector<Eigen::MatrixXd> A;     // P_k = A_k A_k^T
    std::vector<Eigen::VectorXd> lin;   // gradient of sum_i tau_ki
    Eigen::VectorXd lin_const;          // u_k = lin_k^T z + lin_const_k
    std::vector<Eigen::VectorXd> l_kk;  // affine minorant of |s_kk|^2
    Eigen::VectorXd j0_kk;
    Eigen::VectorXd qos;
    Eigen::MatrixXd Pobj;               // sum_k P_k / S_k
    double obj_const = 0.0;

    int num_qos() const
    {
        int c = 0;
        for (int k = 0; k < K; ++k)
            c += qos[k] > 0.0;
        return c;
    }
    int num_region() const { return region == RateScaProblem::Region::Ball ? 1 : n; }
};

Eigen::VectorXd to_real(const Eigen::VectorXcd &x)
{
    Eigen::VectorXd z(2 * x.size());
    z.head(x.size()) = x.real();
    z.tail(x.size()) = x.imag();
    return z;
}

Eigen::VectorXcd to_complex(const Eigen::VectorXd &z)
{
    const Eigen::Index n = z.size() / 2;
    Eigen::VectorXcd x(n);
    for (Eigen::Index j = 0; j < n; ++j)
        x[j] = cdouble(z[j], z[n + j]);
    return x;
}

Model build_model(const RateScaProblem &p)
{
    Model m;
    m.K = p.K;
    m.n = static_cast<int>(p.x0.size());
    m.dim = 2 * m.n;
    m.region = p.region;
    m.radius2 = p.radius2;
    if (static_cast<int>(p.coeff.size()) != p.K * p.K)
        throw std::invalid_argument("rate surrogate needs K*K coefficient vectors");
    m.qos = p.qos.size() == p.K ? p.qos : Eigen::VectorXd::Zero(p.K);

    m.P.assign(m.K, Eigen::MatrixXd::Zero(m.dim, m.dim));
    m.A.assign(m.K, Eigen::MatrixXd::Zero(m.dim, 2 * std::max(m.K - 1, 0)));
    m.lin.assign(m.K, Eigen::VectorXd::Zero(m.dim));
    m.l_kk.assign(m.K, Eigen::VectorXd::Zero(m.dim));
    m.lin_const = Eigen::VectorXd::Ones(m.K);
    m.j0_kk.resize(m.K);
    m.Pobj = Eigen::MatrixXd::Zero(m.dim, m.dim);

    for (int k = 0; k < m.K; ++k)
    {
        double S = 1.0;
        int col = 0;
        for (int i = 0; i < m.K; ++i)
        {
            const Eigen::VectorXcd &a = p.coeff[k * m.K + i];
            Eigen::VectorXd alpha(m.dim), beta(m.dim);
            alpha << a.real(), -a.imag();
            beta << a.imag(), a.real();
            const cdouble s0 = a.transpose() * p.x0;
            const double j0 = std::norm(s0);
            const Eigen::VectorXd l = 2.0 * (s0.real() * alpha + s0.imag() * beta);
            m.lin[k] += l;
            m.lin_const[k] -= j0;
            if (i == k)
            {
                m.l_kk[k] = l;
                m.j0_kk[k] = j0;
            }
            else
            {
                m.P[k].noalias() += alpha * alpha.transpose() + beta * beta.transpose();
                m.A[k].col(col++) = alpha;
                m.A[k].col(col++) = beta;
                S += j0;
            }
        }
        m.Pobj += m.P[k] / S;
        m.obj_const += -std::log2(S) + (S - 1.0) / (S * kLn2);
    }
    return m;
}

double objective(const Model &m, const Eigen::VectorXd &z)
{
    double f = m.obj_const - z.dot(m.Pobj * z) / kLn2;
    for (int k = 0; k < m.K; ++k)
    {
        const double u = m.lin[k].dot(z) + m.lin_const[k];
        if (!(u > 0.0))
            return -kInf;
        f += std::log2(u);
    }
    return f;
}

// Region constraint values g_r(z) (feasible when < 0).
void region_values(const Model &m, const Eigen::VectorXd &z, Eigen::VectorXd &g)
{
    if (m.region == RateScaProblem::Region::Ball)
    {
        g.resize(1);
        g[0] = z.squaredNorm() - m.radius2;
    }
    else
    {
        g.resize(m.n);
        for (int j = 0; j < m.n; ++j)
            g[j] = z[j] * z[j] + z[m.n + j] * z[m.n + j] - 1.0;
    }
}

double qos_value(const Model &m, int k, const Eigen::VectorXd &z)
{
    return m.qos[k] * (z.dot(m.P[k] * z) + 1.0) - (m.l_kk[k].dot(z) - m.j0_kk[k]);
}

// Adds barrier derivatives of the region constraints.
double add_region_barrier(const Model &m, const Eigen::VectorXd &z, Eigen::VectorXd *grad, Eigen::MatrixXd *hess)
{
    double val = 0.0;
    if (m.region == RateScaProblem::Region::Ball)
    {
        const double g = z.squaredNorm() - m.radius2;
        if (!(g < 0.0))
            return kInf;
        val -= std::log(-g);
        if (grad)
        {
            *grad += 2.0 * z / (-g);
            hess->noalias() += 4.0 * z * z.transpose() / (g * g);
            hess->diagonal().array() += 2.0 / (-g);
        }
        return val;
    }
    for (int j = 0; j < m.n; ++j)
    {
        const double a = z[j], b = z[m.n + j];
        const double g = a * a + b * b - 1.0;
        if (!(g < 0.0))
            return kInf;
        val -= std::log(-g);
        if (grad)
        {
            const double w = 1.0 / (g * g);
            (*grad)[j] += 2.0 * a / (-g);
            (*grad)[m.n + j] += 2.0 * b / (-g);
            (*hess)(j, j) += 4.0 * a * a * w + 2.0 / (-g);
            (*hess)(m.n + j, m.n + j) += 4.0 * b * b * w + 2.0 / (-g);
            (*hess)(j, m.n + j) += 4.0 * a * b * w;
            (*hess)(m.n + j, j) += 4.0 * a * b * w;
        }
    }
    return val;
}

struct Newton
{
    std::function<double(const Eigen::VectorXd &)> value;
    std::function<void(const Eigen::VectorXd &, Eigen::VectorXd &, Eigen::MatrixXd &)> derivs;
};

// Damped Newton centering. Returns the number of steps taken.
int center(const Newton &nw, Eigen::VectorXd &z, int max_steps, double tol,
           const std::function<bool(const Eigen::VectorXd &)> &early_stop = {})
{
    const Eigen::Index d = z.size();
    Eigen::VectorXd g(d);
    Eigen::MatrixXd H(d, d);
    double fz = nw.value(z);
    int steps = 0;
    for (; steps < max_steps; ++steps)
    {
        g.setZero();
        H.setZero();
        nw.derivs(z, g, H);
        Eigen::LLT<Eigen::MatrixXd> llt(H);
        Eigen::VectorXd dz;
        if (llt.info() == Eigen::Success)
            dz = -llt.solve(g);
        if (llt.info() != Eigen::Success || !dz.allFinite())
        {
            H.diagonal().array() += 1e-12 * (1.0 + H.diagonal().cwiseAbs().maxCoeff());
            dz = -H.ldlt().solve(g);
            if (!dz.allFinite())
                break;
        }
        const double dec = -g.dot(dz);
        if (dec <= 2.0 * tol)
            break;

        double step = 1.0;
        bool moved = false;
        for (int bt = 0; bt < 60; ++bt, step *= 0.5)
        {
            const Eigen::VectorXd zn = z + step * dz;
            const double fn = nw.value(zn);
            if (std::isfinite(fn) && fn <= fz - 0.01 * step * dec)
            {
                z = zn;
                fz = fn;
                moved = true;
                break;
            }
        }
        if (!moved)
            break;
        if (early_stop && early_stop(z))
        {
            ++steps;
            break;
        }
    }
    return steps;
}

} // namespace

Eigen::VectorXd true_rates(const RateScaProblem &p, const Eigen::VectorXcd &x)
{
    Eigen::VectorXd r(p.K);
    for (int k = 0; k < p.K; ++k)
    {
        double total = 1.0, desired = 0.0;
        for (int i = 0; i < p.K; ++i)
        {
            const double j = std::norm(cdouble(p.coeff[k * p.K + i].transpose() * x));
            total += j;
            if (i == k)
                desired = j;
        }
        r[k] = std::log2(total) - std::log2(total - desired);
    }
    return r;
}

double true_rate_sum(const RateScaProblem &p, const Eigen::VectorXcd &x) { return true_rates(p, x).sum(); }

double surrogate_value(const RateScaProblem &p, const Eigen::VectorXcd &x)
{
    return objective(build_model(p), to_real(x));
}

RateScaSolution solve_rate_sca(const RateScaProblem &p, const RateScaOptions &opt)
{
    const Model m = build_model(p);
    RateScaSolution sol;
    sol.x = p.x0;
    const Eigen::VectorXd z0 = to_real(p.x0);
    sol.surrogate_x0 = objective(m, z0);
    sol.surrogate = sol.surrogate_x0;

    // Strict interior of the region.
    Eigen::VectorXd z = z0;
    {
        Eigen::VectorXd g;
        region_values(m, z, g);
        if (g.maxCoeff() > -1e-6)
            z *= 0.999;
        region_values(m, z, g);
        if (!(g.maxCoeff() < 0.0))
            z.setZero();
    }

    const int nq = m.num_qos();
    const int ncons = m.num_region() + nq;

    auto qos_slack = [&](const Eigen::VectorXd &zz) {
        double worst = -kInf;
        for (int k = 0; k < m.K; ++k)
            if (m.qos[k] > 0.0)
                worst = std::max(worst, qos_value(m, k, zz));
        return worst;
    };
    auto domain_ok = [&](const Eigen::VectorXd &zz) {
        for (int k = 0; k < m.K; ++k)
            if (!(m.lin[k].dot(zz) + m.lin_const[k] > 0.0))
                return false;
        return true;
    };

    // Phase I: min s  s.t.  g_qos(z) <= s, region, u_k > 0.
    if (nq > 0 && !(qos_slack(z) < 0.0))
    {
        if (!domain_ok(z))
        {
            sol.qos_feasible = false;
            return sol;
        }
        Eigen::VectorXd zs(m.dim + 1);
        zs.head(m.dim) = z;
        zs[m.dim] = qos_slack(z) + 1.0 + std::abs(qos_slack(z));
        double t = 1.0;

        Newton nw;
        nw.value = [&](const Eigen::VectorXd &v) {
            const Eigen::VectorXd zz = v.head(m.dim);
            const double s = v[m.dim];
            double val = t * s + add_region_barrier(m, zz, nullptr, nullptr);
            if (!std::isfinite(val))
                return kInf;
            for (int k = 0; k < m.K; ++k)
            {
                const double u = m.lin[k].dot(zz) + m.lin_const[k];
                if (!(u > 0.0))
                    return kInf;
                val -= std::log(u);
                if (m.qos[k] > 0.0)
                {
                    const double r = s - qos_value(m, k, zz);
                    if (!(r > 0.0))
                        return kInf;
                    val -= std::log(r);
                }
            }
            return val;
        };
        nw.derivs = [&](const Eigen::VectorXd &v, Eigen::VectorXd &g, Eigen::MatrixXd &H) {
            const Eigen::VectorXd zz = v.head(m.dim);
            const double s = v[m.dim];
            Eigen::VectorXd gz = Eigen::VectorXd::Zero(m.dim);
            Eigen::MatrixXd Hz = Eigen::MatrixXd::Zero(m.dim, m.dim);
            add_region_barrier(m, zz, &gz, &Hz);
            g.head(m.dim) = gz;
            H.topLeftCorner(m.dim, m.dim) = Hz;
            g[m.dim] = t;
            for (int k = 0; k < m.K; ++k)
            {
                const double u = m.lin[k].dot(zz) + m.lin_const[k];
                g.head(m.dim) -= m.lin[k] / u;
                H.topLeftCorner(m.dim, m.dim).noalias() += m.lin[k] * m.lin[k].transpose() / (u * u);
                if (m.qos[k] > 0.0)
                {
                    const double r = s - qos_value(m, k, zz);
                    Eigen::VectorXd dr(m.dim + 1);
                    dr.head(m.dim) = -(2.0 * m.qos[k] * (m.P[k] * zz) - m.l_kk[k]);
                    dr[m.dim] = 1.0;
                    g -= dr / r;
                    H.noalias() += dr * dr.transpose() / (r * r);
                    H.topLeftCorner(m.dim, m.dim) += 2.0 * m.qos[k] * m.P[k] / r;
                }
            }
        };
        const int nc1 = m.num_region() + m.K + nq;
        bool found = false;
        while (!found && nc1 / t > opt.gap_tol)
        {
            sol.newton_steps += center(nw, zs, opt.max_newton, opt.newton_tol, [&](const Eigen::VectorXd &v) {
                return qos_slack(v.head(m.dim)) < 0.0;
            });
            found = qos_slack(zs.head(m.dim)) < 0.0;
            t *= opt.t_growth;
        }
        if (!found)
        {
            sol.qos_feasible = false;
            return sol;
        }
        z = zs.head(m.dim);
    }

    // Phase II.
    double t = opt.t0;
    Newton nw;
    nw.value = [&](const Eigen::VectorXd &zz) {
        const double f = objective(m, zz);
        if (!std::isfinite(f))
            return kInf;
        double val = -t * f + add_region_barrier(m, zz, nullptr, nullptr);
        if (!std::isfinite(val))
            return kInf;
        for (int k = 0; k < m.K; ++k)
            if (m.qos[k] > 0.0)
            {
                const double g = qos_value(m, k, zz);
                if (!(g < 0.0))
                    return kInf;
                val -= std::log(-g);
            }
        return val;
    };
    // Hessian as t Pobj-part + U diag(w) U^T over the low-rank factors.
    const int qcols = 2 * std::max(m.K - 1, 0);
    Eigen::MatrixXd U(m.dim, 2 * m.K + m.K * qcols);
    Eigen::VectorXd w(U.cols());
    const Eigen::MatrixXd Pobj2 = 2.0 * m.Pobj / kLn2;
    nw.derivs = [&](const Eigen::VectorXd &zz, Eigen::VectorXd &g, Eigen::MatrixXd &H) {
        g.noalias() += t * (Pobj2 * zz);
        H = t * Pobj2;
        int c = 0;
        for (int k = 0; k < m.K; ++k)
        {
            const double u = m.lin[k].dot(zz) + m.lin_const[k];
            g -= t * m.lin[k] / (u * kLn2);
            U.col(c) = m.lin[k];
            w[c++] = t / (u * u * kLn2);
            if (m.qos[k] > 0.0)
            {
                const double q = qos_value(m, k, zz);
                const Eigen::VectorXd dq = 2.0 * m.qos[k] * (m.P[k] * zz) - m.l_kk[k];
                g += dq / (-q);
                U.col(c) = dq;
                w[c++] = 1.0 / (q * q);
                U.middleCols(c, qcols) = m.A[k];
                w.segment(c, qcols).setConstant(2.0 * m.qos[k] / (-q));
                c += qcols;
            }
        }
        H.noalias() += U.leftCols(c) * w.head(c).asDiagonal() * U.leftCols(c).transpose();
        add_region_barrier(m, zz, &g, &H);
    };

    for (;;)
    {
        sol.newton_steps += center(nw, z, opt.max_newton, opt.newton_tol);
        sol.gap = ncons / t;
        if (sol.gap <= opt.gap_tol)
        {
            sol.converged = true;
            break;
        }
        t *= opt.t_growth;
    }

    sol.x = to_complex(z);
    sol.surrogate = objective(m, z);
    return sol;
}

} // namespace flexsim
