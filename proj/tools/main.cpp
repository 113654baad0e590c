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
#include "flexsim/config_io.hpp"
#include "flexsim/harness.hpp"
#include "flexsim/verify/criteria.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

using namespace flexsim;

namespace
{

using Override = std::function<void(ScenarioConfig &, AlgorithmConfig &)>;

// Scenario and algorithm flags shared by every subcommand. Values are applied
// after the config file, in command-line order.
struct CommonFlags
{
    std::string config_path;
    std::vector<Override> overrides;
    std::uint64_t seed = 1;
    int threads = 1;
    std::string out = "-";

    template <typename T>
    void add(CLI::App *app, const std::string &name, const std::string &help,
             std::function<void(ScenarioConfig &, AlgorithmConfig &, const T &)> fn)
    {
        app->add_option_function<T>(
            name, [this, fn](const T &v) { overrides.push_back([fn, v](auto &c, auto &a) { fn(c, a, v); }); }, help)
            ->delimiter(',');
    }

    void attach(CLI::App *app)
    {
        app->add_option("--config", config_path, "YAML configuration file")->check(CLI::ExistingFile);
        app->add_option("--seed", seed, "base seed");
        app->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
        app->add_option("--out", out, "output CSV path, - for stdout");

        using C = ScenarioConfig;
        using A = AlgorithmConfig;
        add<double>(app, "--carrier-hz", "carrier frequency [Hz]; rescales wavelength-based lengths",
                    [](C &c, A &, const double &v) {
                        c.carrier_freq = v;
                        c.rescale_to_wavelength();
                    });
        add<int>(app, "--antennas", "transmit antennas M", [](C &c, A &, const int &v) { c.num_tx_antennas = v; });
        add<int>(app, "--layers", "metasurface layers L", [](C &c, A &, const int &v) { c.set_num_layers(v, false); });
        add<int>(app, "--atoms", "meta-atoms per layer N", [](C &c, A &, const int &v) { c.set_atoms_per_layer(v); });
        add<int>(app, "--atoms-per-row", "atoms per row N_x", [](C &c, A &, const int &v) { c.atoms_per_row = v; });
        add<int>(app, "--users", "users K", [](C &c, A &, const int &v) { c.set_num_users(v); });
        add<double>(app, "--antenna-area", "antenna area [wavelength^2]",
                    [](C &c, A &, const double &v) { c.antenna_area = v * c.wavelength() * c.wavelength(); });
        add<double>(app, "--atom-area", "meta-atom area [wavelength^2]",
                    [](C &c, A &, const double &v) { c.atom_area = v * c.wavelength() * c.wavelength(); });
        add<double>(app, "--antenna-spacing", "antenna spacing [wavelengths]",
                    [](C &c, A &, const double &v) { c.antenna_spacing = v * c.wavelength(); });
        add<double>(app, "--atom-spacing-x", "atom spacing along x [wavelengths]",
                    [](C &c, A &, const double &v) { c.atom_spacing_x = v * c.wavelength(); });
        add<double>(app, "--atom-spacing-z", "atom spacing along z [wavelengths]",
                    [](C &c, A &, const double &v) { c.atom_spacing_z = v * c.wavelength(); });
        add<double>(app, "--x-offset", "x of the reference atom [wavelengths]",
                    [](C &c, A &, const double &v) { c.x_offset = v * c.wavelength(); });
        add<double>(app, "--z-offset", "z of the reference atom [wavelengths]",
                    [](C &c, A &, const double &v) { c.z_offset = v * c.wavelength(); });
        add<std::vector<double>>(app, "--nominal-gap", "layer gaps [wavelengths], one value or one per layer",
                                 [](C &c, A &, const std::vector<double> &v) {
                                     if (v.size() == 1)
                                         c.nominal_gaps.assign(c.num_layers, v[0] * c.wavelength());
                                     else if (static_cast<int>(v.size()) == c.num_layers)
                                         for (int l = 0; l < c.num_layers; ++l)
                                             c.nominal_gaps[l] = v[l] * c.wavelength();
                                     else
                                         throw std::invalid_argument("--nominal-gap needs 1 or L values");
                                 });
        add<double>(app, "--morph-range", "morphing range [wavelengths]",
                    [](C &c, A &, const double &v) { c.morph_range = v * c.wavelength(); });
        add<double>(app, "--min-distance", "minimum inter-layer distance [wavelengths]",
                    [](C &c, A &, const double &v) { c.min_distance = v * c.wavelength(); });
        add<double>(app, "--power-dbm", "transmit power budget [dBm]",
                    [](C &c, A &, const double &v) { c.power_budget = dbm_to_watt(v); });
        add<std::vector<double>>(app, "--noise-dbm", "noise power [dBm], one value or one per user",
                                 [](C &c, A &, const std::vector<double> &v) {
                                     if (v.size() == 1)
                                         c.noise_vars.assign(c.num_users, dbm_to_watt(v[0]));
                                     else if (static_cast<int>(v.size()) == c.num_users)
                                         for (int k = 0; k < c.num_users; ++k)
                                             c.noise_vars[k] = dbm_to_watt(v[k]);
                                     else
                                         throw std::invalid_argument("--noise-dbm needs 1 or K values");
                                 });
        add<int>(app, "--paths", "propagation paths per user (first is line of sight)",
                 [](C &c, A &, const int &v) { c.num_paths = v; });
        add<int>(app, "--quant-bits", "phase quantization bits", [](C &c, A &, const int &v) { c.quant_bits = v; });
        add<double>(app, "--rate-threshold-factor", "QoS threshold factor on the initial SINR",
                    [](C &c, A &, const double &v) { c.rate_threshold_factor = v; });
        add<double>(app, "--tol", "outer convergence tolerance [bits/s/Hz]",
                    [](C &, A &a, const double &v) { a.ao.tol = v; });
        add<int>(app, "--max-outer", "outer iteration cap", [](C &, A &a, const int &v) { a.ao.max_outer = v; });
        add<double>(app, "--morph-initial-move", "first trial move of the morphing step [wavelengths]",
                    [](C &, A &a, const double &v) { a.morph.initial_move = v; });
        add<int>(app, "--sca-rounds", "continuous phase SCA rounds per layer",
                 [](C &, A &a, const int &v) { a.phase.sca_rounds = v; });
        add<int>(app, "--bf-rounds", "precoder SCA rounds", [](C &, A &a, const int &v) { a.bf.max_rounds = v; });
        app->add_flag_function(
            "--timing", [this](std::int64_t) { overrides.push_back([](C &, A &a) { a.ao.timing = true; }); },
            "record wall-clock time per run");
    }

    void resolve(ScenarioConfig &cfg, AlgorithmConfig &algo) const
    {
        if (!config_path.empty())
            load_config_file(config_path, cfg, algo);
        for (const auto &o : overrides)
            o(cfg, algo);
        cfg.validate();
    }
};

std::vector<Architecture> parse_modes(const std::vector<std::string> &names)
{
    std::vector<Architecture> out;
    for (const auto &n : names)
        out.push_back(parse_architecture(n));
    return out;
}

// Opens --out or falls back to stdout.
class Output
{
public:
    explicit Output(const std::string &path)
    {
        if (path.empty() || path == "-")
            return;
        file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
        if (!*file_)
            throw std::runtime_error("cannot open " + path);
    }
    std::ostream &stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"flexsim: flexible stacked metasurface simulation and optimization"};
    app.require_subcommand(1);

    // sweep
    CommonFlags sweep_flags;
    std::string sweep_var = "morph_range", sweep_phase = "continuous";
    std::vector<double> sweep_values;
    std::vector<std::string> sweep_modes{"RSIM", "HSIM", "DSIM", "SFIM"};
    int sweep_realizations = 20;
    auto *sweep = app.add_subcommand("sweep", "Monte-Carlo sweep of one parameter");
    sweep_flags.attach(sweep);
    sweep->add_option("--var", sweep_var,
                      "morph_range | num_layers | atoms_per_layer | power_budget_dbm | quant_bits | iterations");
    sweep->add_option("--values", sweep_values, "sweep values")->delimiter(',')->required();
    sweep->add_option("--modes", sweep_modes, "architectures")->delimiter(',');
    sweep->add_option("--phase-mode", sweep_phase, "continuous | discrete");
    sweep->add_option("--realizations", sweep_realizations, "channel draws per point")->check(CLI::PositiveNumber);

    // converge
    CommonFlags conv_flags;
    std::vector<std::string> conv_modes{"RSIM", "HSIM", "DSIM", "SFIM"};
    std::vector<std::string> conv_phases{"continuous", "discrete"};
    std::string morph_out;
    auto *conv = app.add_subcommand("converge", "per-iteration sum-rate traces on one draw");
    conv_flags.attach(conv);
    conv->add_option("--modes", conv_modes, "architectures")->delimiter(',');
    conv->add_option("--phase-modes", conv_phases, "continuous and/or discrete")->delimiter(',');
    conv->add_option("--morph-out", morph_out, "CSV of the final morphing profiles");

    // perturb
    CommonFlags pert_flags;
    std::vector<double> pert_ranges{0.01, 0.02, 0.03, 0.04, 0.05};
    int pert_seeds = 20;
    auto *pert = app.add_subcommand("perturb", "first-order flexibility gain in the single-antenna single-user link");
    pert_flags.attach(pert);
    pert->add_option("--ranges", pert_ranges, "morphing ranges [wavelengths]")->delimiter(',');
    pert->add_option("--realizations", pert_seeds, "channel draws")->check(CLI::PositiveNumber);

    // validate
    std::vector<std::string> val_ids;
    verify::CriterionOptions val_opt;
    auto *val = app.add_subcommand("validate", "run the acceptance checks");
    val->add_option("--criteria", val_ids, "criterion ids (default: all)")->delimiter(',');
    val->add_option("--threads", val_opt.threads, "worker threads")->check(CLI::PositiveNumber);
    val->add_option("--realizations", val_opt.realizations, "draws for the trend checks")
        ->check(CLI::PositiveNumber);
    val->add_flag("--verbose,-v", val_opt.verbose, "print measured quantities");

    // dump-channel
    CommonFlags dump_flags;
    auto *dump = app.add_subcommand("dump-channel", "propagation matrices of the rigid stack");
    dump_flags.attach(dump);

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*sweep)
        {
            SweepSpec spec;
            sweep_flags.resolve(spec.base, spec.algo);
            spec.variable = parse_sweep_variable(sweep_var);
            spec.values = sweep_values;
            spec.modes = parse_modes(sweep_modes);
            spec.phase_mode = parse_phase_mode(sweep_phase);
            spec.realizations = sweep_realizations;
            spec.base_seed = sweep_flags.seed;
            spec.threads = sweep_flags.threads;
            const auto rows = run_sweep(spec);
            Output out(sweep_flags.out);
            write_sweep_csv(out.stream(), spec, rows);
        }
        else if (*conv)
        {
            ConvergenceSpec spec;
            conv_flags.resolve(spec.cfg, spec.algo);
            spec.modes = parse_modes(conv_modes);
            for (const auto &p : conv_phases)
                spec.phase_modes.push_back(parse_phase_mode(p));
            spec.seed = conv_flags.seed;
            spec.threads = conv_flags.threads;
            std::vector<AoResult> finals;
            const auto rows = run_convergence(spec, &finals);
            Output out(conv_flags.out);
            write_convergence_csv(out.stream(), rows);
            if (!morph_out.empty())
            {
                Output m(morph_out);
                size_t j = 0;
                for (auto pm : spec.phase_modes)
                    for (auto mode : spec.modes)
                    {
                        std::ostringstream part;
                        write_morph_csv(part, spec.cfg, mode, pm, finals[j++].state.morph.y);
                        // One schema and header line for the whole file.
                        std::string text = part.str();
                        if (j > 1)
                            for (int skip = 0; skip < 2; ++skip)
                                text.erase(0, text.find('\n') + 1);
                        m.stream() << text;
                    }
            }
        }
        else if (*pert)
        {
            PerturbSpec spec;
            spec.cfg = siso_config();
            AlgorithmConfig unused;
            pert_flags.resolve(spec.cfg, unused);
            spec.ranges = pert_ranges;
            spec.seeds = pert_seeds;
            spec.base_seed = pert_flags.seed;
            const auto rows = run_perturbation_sweep(spec);
            Output out(pert_flags.out);
            write_perturbation_csv(out.stream(), rows);
        }
        else if (*val)
        {
            std::vector<const verify::Criterion *> todo;
            if (val_ids.empty())
                for (const auto &c : verify::criteria())
                    todo.push_back(&c);
            else
                for (const auto &id : val_ids)
                    todo.push_back(&verify::find_criterion(id));
            int failed = 0;
            for (const auto *c : todo)
            {
                const auto r = verify::run_criterion(*c, val_opt);
                std::cout << (r.passed ? "PASS " : "FAIL ") << r.id << ' ' << r.title << " (" << r.seconds << " s)\n";
                if (val_opt.verbose || !r.passed)
                    for (const auto &d : r.details)
                        std::cout << "    " << d << '\n';
                failed += r.passed ? 0 : 1;
            }
            return failed == 0 ? 0 : 1;
        }
        else if (*dump)
        {
            ScenarioConfig cfg = ScenarioConfig::defaults();
            AlgorithmConfig unused;
            dump_flags.resolve(cfg, unused);
            const Layout layout(cfg);
            const UserGeometry geom = sample_scenario(cfg, dump_flags.seed);
            const ChannelStack stack = build_channels(layout, Eigen::VectorXd::Zero(cfg.total_atoms()), geom);
            Output out(dump_flags.out);
            dump_omega(out.stream(), stack);
        }
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
