/* Copyright 2026 The vmsolver Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef VMSOLVER_VMSOLVER_HPP_
#define VMSOLVER_VMSOLVER_HPP_

#include "vmsolver/calibration.hpp"
#include "vmsolver/catalog.hpp"
#include "vmsolver/economics.hpp"
#include "vmsolver/error.hpp"
#include "vmsolver/fixtures.hpp"
#include "vmsolver/model.hpp"
#include "vmsolver/perf_model.hpp"
#include "vmsolver/planner.hpp"
#include "vmsolver/report.hpp"
#include "vmsolver/suitability.hpp"
#include "vmsolver/units.hpp"

#endif  // VMSOLVER_VMSOLVER_HPP_
