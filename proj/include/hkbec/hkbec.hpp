// Copyright 2026 hkbec contributors
//
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

#include "hkbec/errors.hpp"
#include "hkbec/quadrature.hpp"
#include "hkbec/special_functions.hpp"
#include "hkbec/spectrum.hpp"
#include "hkbec/fit.hpp"
#include "hkbec/heat_kernel_bounds.hpp"
#include "hkbec/ideal_gas.hpp"
#include "hkbec/relativistic_gas.hpp"
#include "hkbec/bogoliubov.hpp"
#include "hkbec/depletion.hpp"
#include "hkbec/berezin_lieb.hpp"
#include "hkbec/report.hpp"
#include "hkbec/config.hpp"
