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

// Runs every acceptance criterion (or the ids given on the command line) and
// prints one PASS/FAIL line per criterion. Exit status 1 if any fails.

#include "flexsim/verify/criteria.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <exception>

int main(int argc, char **argv)
{
    CLI::App app{"flexsim acceptance suite"};
    std::vector<std::string> ids;
    flexsim::verify::CriterionOptions opt;
    app.add_option("ids", ids, "criterion ids (default: all)");
    app.add_option("--threads", opt.threads, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--realizations", opt.realizations, "draws for the trend checks")->check(CLI::PositiveNumber);
    app.add_flag("-v,--verbose", opt.verbose, "print measured quantities");
    CLI11_PARSE(app, argc, argv);

    try
    {
        std::vector<const flexsim::verify::Criterion *> run;
        if (ids.empty())
            for (const auto &c : flexsim::verify::criteria())
                run.push_back(&c);
        else
            for (const auto &id : ids)
                run.push_back(&flexsim::verify::find_criterion(id));

        int failed = 0;
        for (const auto *c : run)
        {
            const auto r = flexsim::verify::run_criterion(*c, opt);
            std::printf("%s criterion %s: %s (%.1f s)\n", r.passed ? "PASS" : "FAIL", r.id.c_str(), r.title.c_str(),
                        r.seconds);
            for (const auto &d : r.details)
                std::printf("    %s\n", d.c_str());
            std::fflush(stdout);
            failed += !r.passed;
        }
        std::printf("%d of %zu criteria passed\n", static_cast<int>(run.size()) - failed, run.size());
        return failed == 0 ? 0 : 1;
    }
    catch (const std::exception &e)
    {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
