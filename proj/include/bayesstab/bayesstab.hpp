// Copyright 2026 The bayesstab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Umbrella header. json_io.hpp is not included here so that users who do not
// need JSON do not pull in nlohmann/json.

#ifndef BAYESSTAB_BAYESSTAB_HPP_
#define BAYESSTAB_BAYESSTAB_HPP_

#include "bayesstab/analysts.hpp"
#include "bayesstab/bounds.hpp"
#include "bayesstab/core.hpp"
#include "bayesstab/error.hpp"
#include "bayesstab/harness.hpp"
#include "bayesstab/mechanisms.hpp"
#include "bayesstab/optimize.hpp"
#include "bayesstab/oracle.hpp"
#include "bayesstab/random.hpp"

#endif  // BAYESSTAB_BAYESSTAB_HPP_
