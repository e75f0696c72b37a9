// fairdet -- subgroup fairness evaluation for speaker verification scores
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Umbrella header.

#pragma once

#include "fairdet/commands.hpp"
#include "fairdet/cost.hpp"
#include "fairdet/curve.hpp"
#include "fairdet/det.hpp"
#include "fairdet/distribution.hpp"
#include "fairdet/error.hpp"
#include "fairdet/fairness.hpp"
#include "fairdet/ingest.hpp"
#include "fairdet/probit.hpp"
#include "fairdet/report_io.hpp"
#include "fairdet/svg.hpp"
#include "fairdet/synth.hpp"
#include "fairdet/trial.hpp"
