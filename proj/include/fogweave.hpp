// Copyright 2026 The fogweave Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Umbrella header. config.hpp needs yaml-cpp and is included separately.

#include "fogweave/app_model.hpp"
#include "fogweave/csv.hpp"
#include "fogweave/evaluation.hpp"
#include "fogweave/experiments.hpp"
#include "fogweave/infra_model.hpp"
#include "fogweave/lp_format.hpp"
#include "fogweave/milp.hpp"
#include "fogweave/montecarlo.hpp"
#include "fogweave/parallel.hpp"
#include "fogweave/rng.hpp"
#include "fogweave/scenario.hpp"
#include "fogweave/solver.hpp"
