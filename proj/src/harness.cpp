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

#include "flexsim/harness.hpp"

#include "flexsim/perturbation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <thread>

namespace flexsim
{

std::string_view to_string(SweepVariable v)
{
    switch (v)
    {
    case SweepVariable::MorphRange:
        return "morph_range";
    case SweepVariable::NumLayers:
        return "num_layers";
    case SweepVariable::AtomsPerLayer:
        return "atoms_per_layer";
    case SweepVariable::PowerBudgetDbm:
        return "power_budget_dbm";
    case SweepVariable::QuantBits:
        return "quant_bits";
    case SweepVariable::Iterations:
        return "iterations";
    }
    return "?";
}

SweepVariable parse_sweep_variable(std::string_view s)
{
    for (auto v : {SweepVariable::MorphRange, SweepVariable::NumLayers, SweepVariable::AtomsPerLayer,
                   SweepVariable::PowerBudgetDbm, SweepVariable::QuantBits, SweepVariable::Iterations})
        if (s == to_string(v))
            return v;
    throw std::invalid_argument("unknown sweep variable: " + std::string(s));
}

void SweepSpec::validate() const
{
    if (values.empty())
        throw std::invalid_argument("sweep needs at least one value");
    if (modes.empty())
        throw std::invalid_argument("sweep needs at least one architecture");
    if (realizations < 1)
        throw std::invalid_argument("sweep needs at least one realization");
    base.validate();
}

namespace
{

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Runs fn(0..count-1) on a small pool. Results are written by index, so the
// output order never depends on scheduling.
void parallel_for(int count, int threads, const std::function<void(int)> &fn)
{
    threads = std::max(1, std::min(threads, count));
    if (threads == 1)
    {
        for (int i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (int i = next++; i < count; i = next++)
                fn(i);
        });
    for (auto &th : pool)
        th.join();
}

std::string num(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string clean(std::string s)
{
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

} // namespace

std::uint64_t derive_seed(std::uint64_t base_seed, int realization)
{
    return splitmix64(splitmix64(base_seed) ^ static_cast<std::uint64_t>(realization));
}

ScenarioConfig apply_sweep_value(const ScenarioConfig &base, SweepVariable v, double value)
{
    ScenarioConfig cfg = base;
    switch (v)
    {
    case SweepVariable::MorphRange:
        cfg.morph_range = value * cfg.wavelength();
        break;
    case SweepVariable::NumLayers:
        cfg.set_num_layers(static_cast<int>(std::lround(value)), true);
        break;
    case SweepVariable::AtomsPerLayer:
        cfg.set_atoms_per_layer(static_cast<int>(std::lround(value)));
        break;
    case SweepVariable::PowerBudgetDbm:
        cfg.power_budget = dbm_to_watt(value);
        break;
    case SweepVariable::QuantBits:
        cfg.quant_bits = static_cast<int>(std::lround(value));
        break;
    case SweepVariable::Iterations:
        break;
    }
    cfg.validate();
    return cfg;
}

std::vector<SweepRow> run_sweep(const SweepSpec &spec)
{
    spec.validate();
    const int nv = static_cast<int>(spec.values.size());
    const int nm = static_cast<int>(spec.modes.size());
    const int nr = spec.realizations;
    std::vector<SweepRow> runs(static_cast<size_t>(nv) * nm * nr);

    parallel_for(static_cast<int>(runs.size()), spec.threads, [&](int job) {
        const int r = job % nr;
        const int m = (job / nr) % nm;
        const int v = job / (nr * nm);
        SweepRow &row = runs[job];
        row.kind = "run";
        row.value = spec.values[v];
        row.mode = spec.modes[m];
        row.phase_mode = spec.phase_mode;
        row.realization = r;
        try
        {
            const ScenarioConfig cfg = apply_sweep_value(spec.base, spec.variable, row.value);
            AlgorithmConfig algo = spec.algo;
            if (spec.variable == SweepVariable::Iterations)
                algo.ao.max_outer = static_cast<int>(std::lround(row.value));
            const UserGeometry geom = sample_scenario(cfg, derive_seed(spec.base_seed, r));
            const AoResult res = run_ao(cfg, geom, row.mode, row.phase_mode, algo);
            row.sum_rate = res.trace.final_sum_rate();
            row.iterations = res.trace.iterations();
            row.wall_ms = res.trace.rows.back().wall_ms;
            row.status = res.trace.qos_warning ? "qos_warning" : "ok";
        }
        catch (const std::exception &e)
        {
            row.status = clean(std::string("error: ") + e.what());
        }
    });

    std::vector<SweepRow> out;
    out.reserve(runs.size() + static_cast<size_t>(nv) * nm);
    for (int v = 0; v < nv; ++v)
        for (int m = 0; m < nm; ++m)
        {
            const size_t first = (static_cast<size_t>(v) * nm + m) * nr;
            double sum = 0.0, sum_it = 0.0, wall = 0.0;
            int ok = 0;
            for (int r = 0; r < nr; ++r)
            {
                const SweepRow &row = runs[first + r];
                out.push_back(row);
                if (row.status.rfind("error", 0) == 0)
                    continue;
                sum += row.sum_rate;
                sum_it += row.iterations;
                wall += row.wall_ms;
                ++ok;
            }
            SweepRow s;
            s.kind = "summary";
            s.value = spec.values[v];
            s.mode = spec.modes[m];
            s.phase_mode = spec.phase_mode;
            s.realization = -1;
            if (ok > 0)
            {
                s.sum_rate = sum / ok;
                double var = 0.0;
                for (int r = 0; r < nr; ++r)
                {
                    const SweepRow &row = runs[first + r];
                    if (row.status.rfind("error", 0) != 0)
                        var += (row.sum_rate - s.sum_rate) * (row.sum_rate - s.sum_rate);
                }
                s.sum_rate_std = ok > 1 ? std::sqrt(var / (ok - 1)) : 0.0;
                s.iterations = static_cast<int>(std::lround(sum_it / ok));
                s.wall_ms = wall / ok;
            }
            s.status = "n=" + std::to_string(ok);
            out.push_back(s);
        }
    return out;
}

void write_sweep_csv(std::ostream &os, const SweepSpec &spec, const std::vector<SweepRow> &rows)
{
    os << kCsvSchema << " sweep\n";
    os << "kind,sweep_var,value,mode,phase_mode,realization,r_sum,r_sum_std,iterations,wall_ms,status\n";
    for (const auto &r : rows)
    {
        os << r.kind << ',' << to_string(spec.variable) << ',' << num(r.value) << ',' << to_string(r.mode) << ','
           << to_string(r.phase_mode) << ',' << (r.realization >= 0 ? std::to_string(r.realization) : "") << ','
           << num(r.sum_rate) << ',' << num(r.sum_rate_std) << ',' << r.iterations << ',' << num(r.wall_ms) << ','
           << r.status << '\n';
    }
}

std::vector<ConvergenceRow> run_convergence(const ConvergenceSpec &spec, std::vector<AoResult> *finals)
{
    std::vector<std::pair<Architecture, PhaseMode>> jobs;
    for (auto pm : spec.phase_modes)
        for (auto m : spec.modes)
            jobs.emplace_back(m, pm);

    std::vector<AoResult> results(jobs.size());
    const UserGeometry geom = sample_scenario(spec.cfg, spec.seed);
    parallel_for(static_cast<int>(jobs.size()), spec.threads, [&](int j) {
        results[j] = run_ao(spec.cfg, geom, jobs[j].first, jobs[j].second, spec.algo);
    });

    std::vector<ConvergenceRow> rows;
    if (spec.algo.ao.max_outer > 0)
        for (size_t j = 0; j < jobs.size(); ++j)
            for (const auto &tr : results[j].trace.rows)
                rows.push_back({jobs[j].first, jobs[j].second, tr.iteration, tr.sum_rate});
    if (finals)
        *finals = std::move(results);
    return rows;
}

void write_convergence_csv(std::ostream &os, const std::vector<ConvergenceRow> &rows)
{
    os << kCsvSchema << " convergence\n";
    os << "mode,phase_mode,iteration,r_sum\n";
    for (const auto &r : rows)
        os << to_string(r.mode) << ',' << to_string(r.phase_mode) << ',' << r.iteration << ',' << num(r.sum_rate)
           << '\n';
}

void write_morph_csv(std::ostream &os, const ScenarioConfig &cfg, Architecture mode, PhaseMode phase_mode,
                     const Eigen::VectorXd &y)
{
    const Layout layout(cfg);
    const double lam = cfg.wavelength();
    os << kCsvSchema << " morph\n";
    os << "mode,phase_mode,layer,atom,x_wl,z_wl,y_hat_wl\n";
    for (int l = 0; l < cfg.num_layers; ++l)
        for (int n = 0; n < cfg.atoms_per_layer; ++n)
            os << to_string(mode) << ',' << to_string(phase_mode) << ',' << l + 1 << ',' << n + 1 << ','
               << num(layout.atom_x(n) / lam) << ',' << num(layout.atom_z(n) / lam) << ','
               << num(y[l * cfg.atoms_per_layer + n] / lam) << '\n';
}

ScenarioConfig siso_config()
{
    ScenarioConfig cfg = ScenarioConfig::defaults();
    cfg.num_tx_antennas = 1;
    cfg.set_num_users(1);
    cfg.set_num_layers(4, false);
    return cfg;
}

PhaseStack perturbation_phases(const ScenarioConfig &cfg, const UserGeometry &geom)
{
    // Responses tuned for the rigid stack, then held fixed.
    AlgorithmConfig algo;
    const AoResult res = run_ao(cfg, geom, Architecture::RSIM, PhaseMode::Continuous, algo);
    return res.state.phases;
}

std::vector<PerturbRow> run_perturbation_sweep(const PerturbSpec &spec)
{
    if (spec.ranges.empty())
        throw std::invalid_argument("perturbation sweep needs at least one morphing range");
    const double lam = spec.cfg.wavelength();
    std::vector<double> ranges;
    for (double r : spec.ranges)
        ranges.push_back(r * lam);

    std::vector<PerturbRow> rows;
    for (int s = 0; s < spec.seeds; ++s)
    {
        const std::uint64_t seed = derive_seed(spec.base_seed, s);
        const UserGeometry geom = sample_scenario(spec.cfg, seed);
        const PhaseStack phases = perturbation_phases(spec.cfg, geom);
        const PerturbReport rep = perturb_gains(spec.cfg, geom, phases, ranges.front());
        const auto table = first_order_validate(spec.cfg, geom, phases, rep, ranges);
        for (const auto &t : table)
            rows.push_back({seed, t.morph_range / lam, t.predicted, t.actual, t.rel_error, t.gain_sfim, t.gain_dsim,
                            t.actual_dsim});
    }
    return rows;
}

void write_perturbation_csv(std::ostream &os, const std::vector<PerturbRow> &rows)
{
    os << kCsvSchema << " perturbation\n";
    os << "seed,morph_range,predicted_gain,actual_gain,rel_error,g_sfim,g_dsim,actual_gain_dsim\n";
    for (const auto &r : rows)
        os << r.seed << ',' << num(r.morph_range) << ',' << num(r.predicted) << ',' << num(r.actual) << ','
           << num(r.rel_error) << ',' << num(r.gain_sfim) << ',' << num(r.gain_dsim) << ',' << num(r.actual_dsim)
           << '\n';
}

} // namespace flexsim
