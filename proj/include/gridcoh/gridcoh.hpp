/*
 * Copyright (c) 2026, The gridcoh Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "gridcoh/coherency.hpp"
#include "gridcoh/config.hpp"
#include "gridcoh/hdbscan.hpp"
#include "gridcoh/partition.hpp"
#include "gridcoh/pipeline.hpp"
#include "gridcoh/report_io.hpp"
#include "gridcoh/spectrum.hpp"
#include "gridcoh/swingsim.hpp"
#include "gridcoh/swingsim_io.hpp"
#include "gridcoh/timeseries.hpp"
