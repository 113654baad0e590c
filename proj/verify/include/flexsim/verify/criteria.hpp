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

// Acceptance checks shared by the acceptance binary and `flexsim validate`.

#include <functional>
#include <string>
#include <vector>

namespace flexsim::verify
{

struct CriterionResult
{
    std::string id;
    std::string title;
    bool passed = false;
    std::vector<std::string> details; // one line per measured quantity
    double seconds = 0.0;
};

struct CriterionOptions
{
    int threads = 1;
    int realizations = 20; // trend checks
    bool verbose = false;
};

struct Criterion
{
    std::string id;
    std::string title;
    std::function<CriterionResult(const CriterionOptions &)> run;
};

// Ids "1" .. "6", "7a" .. "7d".
const std::vector<Criterion> &criteria();
const Criterion &find_criterion(const std::string &id);

// Runs and stamps id, title and wall time.
CriterionResult run_criterion(const Criterion &c, const CriterionOptions &opt);

} // namespace flexsim::verify
