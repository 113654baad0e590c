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

#include "flexsim/verify/criteria.hpp"

#include "flexsim/gradients.hpp"
#include "flexsim/harness.hpp"
#include "flexsim/perturbation.hpp"
#include "flexsim/verify/oracles.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <map>
#include <mutex>
#include <random>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace flexsim::verify
{

namespace
{

std::string fmt(const char *f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char *f, ...)
{
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

ScenarioConfig small_config(int M, int L, int N, int Nx, int K)
{
    ScenarioConfig cfg = ScenarioConfig::defaults();
    cfg.num_tx_antennas = M;
    cfg.set_num_layers(L, false);
    cfg.set_atoms_per_layer(N);
    cfg.atoms_per_row = Nx;
    cfg.set_num_users(K);
    cfg.validate();
    return cfg;
}

Eigen::VectorXcd random_unit(std::mt19937_64 &rng, int n)
{
    std::uniform_real_distribution<double> u(0.0, 2.0 * kPi);
    Eigen::VectorXcd v(n);
    for (int i = 0; i < n; ++i)
        v[i] = std::polar(1.0, u(rng));
    return v;
}

Precoder random_precoder(std::mt19937_64 &rng, int M, int K, double power)
{
    std::normal_distribution<double> g;
    Precoder W(M, K);
    for (int i = 0; i < M; ++i)
        for (int k = 0; k < K; ++k)
            W(i, k) = cdouble(g(rng), g(rng));
    return W * std::sqrt(power) / W.norm();
}

// ---------------------------------------------------------------- gradients

CriterionResult gradient_check(const CriterionOptions &)
{
    CriterionResult res;
    const double tol = 1e-4;
    double worst_sum = 0.0, worst_aug = 0.0;
    for (int seed = 0; seed < 10; ++seed)
    {
        const ScenarioConfig cfg = small_config(2, 3, 4, 2, 2);
        const UserGeometry geom = sample_scenario(cfg, 1000 + seed);
        Problem prob(cfg, geom);
        std::mt19937_64 rng(77 + seed);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        const double lam = cfg.wavelength();

        Eigen::VectorXd y(cfg.total_atoms());
        for (auto &v : y)
            v = u(rng) * cfg.morph_range;
        y = project_feasible(y, prob.constraints);

        PhaseStack phases = PhaseStack::ones(cfg.total_atoms());
        phases.phi = random_unit(rng, cfg.total_atoms());
        const Precoder W = random_precoder(rng, cfg.num_tx_antennas, cfg.num_users, cfg.power_budget);
        // Noise at the received signal level so every rate is of order one.
        const RateReport r0 = sinr_and_rates(cascaded_channel(prob, y, phases), W, prob.noise);
        std::vector<double> noise(cfg.num_users);
        for (int k = 0; k < cfg.num_users; ++k)
            noise[k] = r0.power.row(k).sum();

        const ChannelStack stack = build_channels(prob.layout, y, geom, true);
        GradWorkspace ws = make_workspace(stack, phases, W);
        compute_product_derivatives(ws, stack);
        const RateReport rep = rates_from_products(ws.products, noise);

        Eigen::VectorXd thr(cfg.num_users), slack(cfg.num_users);
        for (int k = 0; k < cfg.num_users; ++k)
        {
            thr[k] = rep.rate[k] * (1.0 + 0.5 * u(rng));
            slack[k] = 0.25 * (1.0 + u(rng));
        }
        const double omega = 0.3 + 0.25 * (1.0 + u(rng));

        auto rates_at = [&](const Eigen::VectorXd &yy) {
            return sinr_and_rates(cascaded_channel(prob, yy, phases), W, noise);
        };
        const Eigen::VectorXd a_sum = grad_sum_rate(ws, noise);
        const Eigen::VectorXd a_aug = grad_aug(ws, rep, noise, thr, slack, omega);
        const Eigen::VectorXd f_sum =
            fd_oracle([&](const Eigen::VectorXd &yy) { return rates_at(yy).sum_rate; }, y, 1e-6 * lam);
        const Eigen::VectorXd f_aug = fd_oracle(
            [&](const Eigen::VectorXd &yy) { return augmented_objective(rates_at(yy), thr, slack, omega); }, y,
            1e-6 * lam);

        auto rel = [](const Eigen::VectorXd &a, const Eigen::VectorXd &f) {
            const double scale = f.lpNorm<Eigen::Infinity>();
            double err = 0.0;
            for (Eigen::Index i = 0; i < f.size(); ++i)
                if (std::abs(f[i]) >= 1e-6 * scale)
                    err = std::max(err, std::abs(a[i] - f[i]));
            return scale > 0.0 ? err / scale : err;
        };
        worst_sum = std::max(worst_sum, rel(a_sum, f_sum));
        worst_aug = std::max(worst_aug, rel(a_aug, f_aug));
    }
    res.passed = worst_sum <= tol && worst_aug <= tol;
    res.details.push_back(fmt("sum-rate gradient: worst relative error %.3g (limit %.0e)", worst_sum, tol));
    res.details.push_back(fmt("augmented gradient: worst relative error %.3g (limit %.0e)", worst_aug, tol));
    return res;
}

// --------------------------------------------------------------- projection

CriterionResult projection_check(const CriterionOptions &)
{
    CriterionResult res;
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst_oracle = 0.0, worst_idem = 0.0, worst_feas = 0.0;
    int instances = 0, redraws = 0;
    while (instances < 50)
    {
        ConstraintSystem cs;
        cs.num_layers = 3 + instances % 4;
        cs.atoms_per_layer = 2;
        cs.morph_range = 1.0;
        cs.zeta.resize(cs.size());
        for (auto &z : cs.zeta)
            z = -0.5 + 1.0 * u(rng);
        Eigen::VectorXd v(cs.size());
        for (auto &x : v)
            x = 2.0 * u(rng);

        Eigen::VectorXd p, q;
        try
        {
            p = project_feasible(v, cs);
        }
        catch (const InfeasibleConstraintsError &)
        {
            ++redraws;
            continue;
        }
        Eigen::MatrixXd A;
        Eigen::VectorXd b;
        dense_constraints(cs, A, b);
        q = brute_force_qp(v, A, b);
        worst_oracle = std::max(worst_oracle, (p - q).lpNorm<Eigen::Infinity>());
        worst_idem = std::max(worst_idem, (project_feasible(p, cs) - p).lpNorm<Eigen::Infinity>());
        worst_feas = std::max(worst_feas, cs.max_violation(p));
        ++instances;
    }
    res.passed = worst_oracle <= 1e-6 && worst_idem <= 1e-9 && worst_feas <= 1e-9;
    res.details.push_back(fmt("%d instances (%d infeasible draws skipped), dimensions 6 to 12", instances, redraws));
    res.details.push_back(fmt("max deviation from the active-set oracle %.3g (limit 1e-6)", worst_oracle));
    res.details.push_back(fmt("max idempotence error %.3g, max violation %.3g (limit 1e-9)", worst_idem, worst_feas));
    return res;
}

// --------------------------------------------------------------- beamformer

CriterionResult beamformer_check(const CriterionOptions &)
{
    CriterionResult res;
    double worst = 0.0, above = 0.0;
    for (int seed = 0; seed < 10; ++seed)
    {
        const ScenarioConfig cfg = small_config(4, 2, 9, 3, 1);
        const UserGeometry geom = sample_scenario(cfg, 500 + seed);
        Problem prob(cfg, geom);
        std::mt19937_64 rng(900 + seed);
        PhaseStack phases = PhaseStack::ones(cfg.total_atoms());
        phases.phi = random_unit(rng, cfg.total_atoms());
        const Eigen::MatrixXcd G = cascaded_channel(prob, Eigen::VectorXd::Zero(cfg.total_atoms()), phases);
        const Eigen::VectorXcd g = G.row(0).transpose();
        // Noise chosen so that the matched filter delivers 8 bits/s/Hz.
        const std::vector<double> noise{cfg.power_budget * g.squaredNorm() / 255.0};
        const Precoder W0 = random_precoder(rng, cfg.num_tx_antennas, 1, cfg.power_budget);
        const BfRunResult run = run_bf_opt(W0, G, noise, Eigen::VectorXd::Zero(1), cfg.power_budget);
        const double rate = sinr_and_rates(G, run.W, noise).sum_rate;
        const double ref = mrt_rate(g, cfg.power_budget, noise[0]);
        worst = std::max(worst, ref - rate);
        above = std::max(above, rate - ref);
    }
    res.passed = worst <= 1e-3 && above <= 1e-9;
    res.details.push_back(fmt("largest shortfall from the matched-filter rate %.3g bits/s/Hz (limit 1e-3)", worst));
    res.details.push_back(fmt("largest excess over the matched-filter rate %.3g", above));
    return res;
}

// ----------------------------------------------------------- discrete phases

CriterionResult discrete_check(const CriterionOptions &)
{
    CriterionResult res;
    double worst = 0.0;
    int matched = 0;
    for (int seed = 0; seed < 10; ++seed)
    {
        ScenarioConfig cfg = small_config(2, 1, 4, 2, 2);
        cfg.quant_bits = 1;
        const UserGeometry geom = sample_scenario(cfg, 300 + seed);
        const Layout layout(cfg);
        std::mt19937_64 rng(40 + seed);
        std::uniform_int_distribution<int> pick(0, cfg.quant_levels() - 1);

        PhaseStack phases = PhaseStack::ones_quantized(cfg.total_atoms(), cfg.quant_bits);
        std::vector<int> start(cfg.atoms_per_layer);
        for (int n = 0; n < cfg.atoms_per_layer; ++n)
        {
            start[n] = pick(rng);
            phases.set_index(n, start[n]);
        }
        const Precoder W = random_precoder(rng, cfg.num_tx_antennas, cfg.num_users, cfg.power_budget);
        const ChannelStack stack = build_channels(layout, Eigen::VectorXd::Zero(cfg.total_atoms()), geom);
        const LayerSurrogate sur = build_layer_surrogate(0, stack, phases, W);
        const Eigen::MatrixXcd s = sur.products();
        std::vector<double> noise(cfg.num_users);
        for (int k = 0; k < cfg.num_users; ++k)
            noise[k] = s.row(k).squaredNorm();
        const Eigen::VectorXd thr = Eigen::VectorXd::Zero(cfg.num_users);

        const DiscreteResult cd = optimize_layer_discrete(sur, start, phases.alphabet, thr, noise);
        Eigen::VectorXcd phi(cfg.atoms_per_layer);
        for (int n = 0; n < cfg.atoms_per_layer; ++n)
            phi[n] = phases.alphabet[cd.index[n]];
        const double got = layer_rates(sur, phi, noise).sum();
        const ExhaustiveResult ex = exhaustive_discrete(sur, phases.alphabet, thr, noise);
        const double gap = std::abs(ex.sum_rate - got);
        worst = std::max(worst, gap);
        matched += gap <= 1e-9;
        res.details.push_back(fmt("seed %d: coordinate descent %.12f, exhaustive %.12f", seed, got, ex.sum_rate));
    }
    res.passed = worst <= 1e-9;
    res.details.insert(res.details.begin(), fmt("%d of 10 seeds match; largest gap %.3g (limit 1e-9)", matched, worst));
    return res;
}

// ------------------------------------------------------------- AO runs

// Jobs fan out over a small pool; results land by index.
void run_parallel(int count, int threads, const std::function<void(int)> &fn)
{
    threads = std::max(1, std::min(threads, count));
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t)
        pool.emplace_back([&] {
            for (int i = next++; i < count; i = next++)
                fn(i);
        });
    for (int i = next++; i < count; i = next++)
        fn(i);
    for (auto &th : pool)
        th.join();
}

const char *name(Architecture a) { return to_string(a).data(); }
const char *name(PhaseMode p) { return to_string(p).data(); }

CriterionResult monotone_check(const CriterionOptions &opt)
{
    CriterionResult res;
    struct Job
    {
        Architecture mode;
        PhaseMode pm;
        int seed;
        double worst_drop = 0.0;
        bool feasible = false;
        int iterations = 0;
        std::string error;
    };
    std::vector<Job> jobs;
    for (auto pm : {PhaseMode::Continuous, PhaseMode::Discrete})
        for (auto m : {Architecture::RSIM, Architecture::HSIM, Architecture::DSIM, Architecture::SFIM})
            for (int s = 0; s < 5; ++s)
                jobs.push_back({m, pm, s, 0.0, false, 0, {}});

    const ScenarioConfig cfg = ScenarioConfig::defaults();
    run_parallel(static_cast<int>(jobs.size()), opt.threads, [&](int j) {
        Job &job = jobs[j];
        try
        {
            Problem prob(cfg, sample_scenario(cfg, derive_seed(1, job.seed)));
            const SystemState init = init_state(prob, job.mode, job.pm);
            const AoResult r = run_ao(prob, init, job.mode, job.pm);
            for (size_t i = 1; i < r.trace.rows.size(); ++i)
                job.worst_drop =
                    std::max(job.worst_drop, r.trace.rows[i - 1].sum_rate - r.trace.rows[i].sum_rate);
            job.feasible = check_feasibility(prob, r.state).ok();
            job.iterations = r.trace.iterations();
        }
        catch (const std::exception &e)
        {
            job.error = e.what();
        }
    });

    double worst = 0.0;
    int infeasible = 0, errors = 0;
    for (const auto &j : jobs)
    {
        worst = std::max(worst, j.worst_drop);
        infeasible += j.error.empty() && !j.feasible;
        if (!j.error.empty())
        {
            ++errors;
            res.details.push_back(fmt("%s/%s seed %d: %s", name(j.mode), name(j.pm), j.seed, j.error.c_str()));
        }
        else if (!j.feasible || j.worst_drop > 1e-8)
            res.details.push_back(fmt("%s/%s seed %d: drop %.3g, feasible %d", name(j.mode), name(j.pm), j.seed,
                                      j.worst_drop, j.feasible));
    }
    res.passed = worst <= 1e-8 && infeasible == 0 && errors == 0;
    res.details.insert(res.details.begin(),
                       fmt("%zu runs: largest decrease %.3g (limit 1e-8), %d infeasible finals, %d errors",
                           jobs.size(), worst, infeasible, errors));
    return res;
}

// ------------------------------------------------------------ perturbation

CriterionResult perturbation_check(const CriterionOptions &)
{
    CriterionResult res;
    const ScenarioConfig cfg = siso_config();
    const double lam = cfg.wavelength();
    const std::vector<double> ranges{0.01 * lam, 0.02 * lam, 0.03 * lam, 0.04 * lam, 0.05 * lam};

    int order_bad = 0;
    double worst_lin = 0.0, worst_err = 0.0, sum_pred = 0.0, sum_act = 0.0;
    std::vector<double> errs;
    for (int s = 0; s < 100; ++s)
    {
        const UserGeometry geom = sample_scenario(cfg, derive_seed(1, s));
        const PhaseStack phases = perturbation_phases(cfg, geom);
        const PerturbReport rep = perturb_gains(cfg, geom, phases, ranges.back());
        const auto rows = first_order_validate(cfg, geom, phases, rep, ranges);
        for (const auto &r : rows)
        {
            order_bad += r.gain_dsim > r.gain_sfim;
            const double slope = r.predicted / r.morph_range;
            const double ref = rows.back().predicted / rows.back().morph_range;
            worst_lin = std::max(worst_lin, std::abs(slope - ref) / std::abs(ref));
        }
        const ValidationRow &last = rows.back();
        errs.push_back(last.rel_error);
        worst_err = std::max(worst_err, last.rel_error);
        sum_pred += last.predicted;
        sum_act += last.actual;
    }
    std::sort(errs.begin(), errs.end());
    const double agg = std::abs(sum_pred - sum_act) / std::abs(sum_act);
    res.passed = order_bad == 0 && worst_lin <= 1e-12 && worst_err <= 0.10;
    res.details.push_back(fmt("DSIM gain above SFIM gain in %d of %d rows", order_bad, 100 * 5));
    res.details.push_back(fmt("predicted gain per unit range varies by %.3g (relative)", worst_lin));
    res.details.push_back(fmt("first-order error at 0.05 wavelength: median %.3g, max %.3g (limit 0.10)",
                              errs[errs.size() / 2], worst_err));
    res.details.push_back(fmt("mean predicted %.4g W vs mean actual %.4g W (aggregate error %.3g)", sum_pred / 100,
                              sum_act / 100, agg));
    return res;
}

// ----------------------------------------------------------------- trends

// Final sum rates of AO runs, memoized so that criteria sharing a point
// (same layers, bits, mode, phase mode and draw) run it once per process.
class TrendRuns
{
public:
    using Key = std::tuple<int, int, int, int, int>; // L, bits, mode, phase mode, draw

    struct Point
    {
        int layers;
        int bits;
        Architecture mode;
        PhaseMode pm;
    };

    // Mean final sum rate of each point over draws 0..realizations-1.
    std::vector<std::vector<double>> rates(const std::vector<Point> &points, int realizations, int threads)
    {
        std::vector<Key> todo;
        {
            std::lock_guard<std::mutex> lock(mu_);
            for (const auto &p : points)
                for (int r = 0; r < realizations; ++r)
                {
                    const Key k = key(p, r);
                    if (!cache_.count(k) && std::find(todo.begin(), todo.end(), k) == todo.end())
                        todo.push_back(k);
                }
        }
        std::vector<double> out(todo.size());
        run_parallel(static_cast<int>(todo.size()), threads, [&](int j) {
            const auto [L, bits, mode, pm, r] = todo[j];
            ScenarioConfig cfg = apply_sweep_value(ScenarioConfig::defaults(), SweepVariable::NumLayers, L);
            if (bits > 0) // continuous points key on 0 bits
                cfg.quant_bits = bits;
            const UserGeometry geom = sample_scenario(cfg, derive_seed(1, r));
            out[j] = run_ao(cfg, geom, static_cast<Architecture>(mode), static_cast<PhaseMode>(pm))
                         .trace.final_sum_rate();
        });
        std::lock_guard<std::mutex> lock(mu_);
        for (size_t j = 0; j < todo.size(); ++j)
            cache_[todo[j]] = out[j];
        std::vector<std::vector<double>> res;
        for (const auto &p : points)
        {
            std::vector<double> v;
            for (int r = 0; r < realizations; ++r)
                v.push_back(cache_.at(key(p, r)));
            res.push_back(v);
        }
        return res;
    }

private:
    static Key key(const Point &p, int r)
    {
        return {p.layers, p.pm == PhaseMode::Continuous ? 0 : p.bits, static_cast<int>(p.mode),
                static_cast<int>(p.pm), r};
    }
    std::mutex mu_;
    std::map<Key, double> cache_;
};

TrendRuns &trend_runs()
{
    static TrendRuns runs;
    return runs;
}

double mean(const std::vector<double> &v)
{
    double s = 0.0;
    for (double x : v)
        s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

constexpr int kLayers = 6;
constexpr int kBits = 2;

CriterionResult ordering_check(const CriterionOptions &opt)
{
    CriterionResult res;
    res.passed = true;
    const Architecture order[] = {Architecture::SFIM, Architecture::DSIM, Architecture::HSIM, Architecture::RSIM};
    for (auto pm : {PhaseMode::Discrete, PhaseMode::Continuous})
    {
        std::vector<TrendRuns::Point> pts;
        for (auto m : order)
            pts.push_back({kLayers, kBits, m, pm});
        const auto r = trend_runs().rates(pts, opt.realizations, opt.threads);
        std::string line = fmt("%s:", name(pm));
        bool ok = true;
        for (size_t i = 0; i < pts.size(); ++i)
        {
            line += fmt(" %s %.4f", name(order[i]), mean(r[i]));
            if (i > 0 && mean(r[i - 1]) < mean(r[i]))
                ok = false;
        }
        res.details.push_back(line + (ok ? "  (ordered)" : "  (out of order)"));
        res.passed = res.passed && ok;
    }
    return res;
}

CriterionResult layers_check(const CriterionOptions &opt)
{
    CriterionResult res;
    std::vector<TrendRuns::Point> pts;
    for (auto m : {Architecture::RSIM, Architecture::SFIM})
        for (int L = 2; L <= 8; ++L)
            pts.push_back({L, kBits, m, PhaseMode::Continuous});
    const auto r = trend_runs().rates(pts, opt.realizations, opt.threads);
    auto at = [&](int m, int L) { return mean(r[static_cast<size_t>(m) * 7 + (L - 2)]); };
    for (int m = 0; m < 2; ++m)
    {
        std::string line = m == 0 ? "RSIM:" : "SFIM:";
        for (int L = 2; L <= 8; ++L)
            line += fmt(" L=%d %.4f", L, at(m, L));
        res.details.push_back(line);
    }
    const double g_rsim = at(0, 8) - at(0, 6);
    const double g_sfim = at(1, 8) - at(1, 6);
    res.passed = g_sfim > 0.0 && g_rsim < 0.5 * g_sfim;
    res.details.push_back(fmt("gain from 6 to 8 layers: RSIM %.4f, SFIM %.4f (need RSIM < 0.5 x SFIM)", g_rsim,
                              g_sfim));
    return res;
}

CriterionResult quantization_ratio_check(const CriterionOptions &opt)
{
    CriterionResult res;
    res.passed = true;
    for (auto m : {Architecture::SFIM, Architecture::DSIM})
    {
        const auto r = trend_runs().rates(
            {{kLayers, 4, m, PhaseMode::Discrete}, {kLayers, kBits, m, PhaseMode::Continuous}}, opt.realizations,
            opt.threads);
        const double ratio = mean(r[0]) / mean(r[1]);
        res.passed = res.passed && ratio >= 0.85;
        res.details.push_back(fmt("%s: 4-bit %.4f, continuous %.4f, ratio %.3f (need >= 0.85)", name(m), mean(r[0]),
                                  mean(r[1]), ratio));
    }
    return res;
}

CriterionResult quantization_monotone_check(const CriterionOptions &opt)
{
    CriterionResult res;
    std::vector<TrendRuns::Point> pts;
    for (int b = 1; b <= 4; ++b)
        pts.push_back({kLayers, b, Architecture::SFIM, PhaseMode::Discrete});
    const auto r = trend_runs().rates(pts, opt.realizations, opt.threads);
    std::string line = "SFIM discrete:";
    res.passed = true;
    for (int b = 0; b < 4; ++b)
    {
        line += fmt(" %d-bit %.4f", b + 1, mean(r[b]));
        if (b > 0 && mean(r[b]) < mean(r[b - 1]))
            res.passed = false;
    }
    res.details.push_back(line);
    int per_draw = 0;
    for (int s = 0; s < opt.realizations; ++s)
    {
        bool ok = true;
        for (int b = 1; b < 4; ++b)
            ok = ok && r[b][s] >= r[b - 1][s];
        per_draw += ok;
    }
    res.details.push_back(fmt("draws individually non-decreasing: %d of %d", per_draw, opt.realizations));
    return res;
}

} // namespace

const std::vector<Criterion> &criteria()
{
    static const std::vector<Criterion> all{
        {"1", "gradient matches central differences", gradient_check},
        {"2", "projection matches the active-set oracle", projection_check},
        {"3", "single-user precoder reaches the matched-filter rate", beamformer_check},
        {"4", "discrete coordinate descent matches exhaustive search", discrete_check},
        {"5", "alternating optimization is monotone and feasible", monotone_check},
        {"6", "first-order flexibility gain", perturbation_check},
        {"7a", "architecture ordering SFIM >= DSIM >= HSIM >= RSIM", ordering_check},
        {"7b", "rigid stack saturates in the number of layers", layers_check},
        {"7c", "4-bit responses reach 85% of continuous", quantization_ratio_check},
        {"7d", "sum rate non-decreasing in quantization bits", quantization_monotone_check},
    };
    return all;
}

const Criterion &find_criterion(const std::string &id)
{
    for (const auto &c : criteria())
        if (c.id == id)
            return c;
    throw std::invalid_argument("unknown criterion: " + id);
}

CriterionResult run_criterion(const Criterion &c, const CriterionOptions &opt)
{
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult r;
    try
    {
        r = c.run(opt);
    }
    catch (const std::exception &e)
    {
        r.passed = false;
        r.details.push_back(std::string("exception: ") + e.what());
    }
    r.id = c.id;
    r.title = c.title;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

} // namespace flexsim::verify
