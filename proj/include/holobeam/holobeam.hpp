// SPDX-License-Identifier: Apache-2.0
//
// holobeam: joint holographic / baseband beamformer design library
// Copyright (C) 2026 The holobeam developers
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

#include "holobeam/algorithms.hpp"
#include "holobeam/channel.hpp"
#include "holobeam/config.hpp"
#include "holobeam/harness.hpp"
#include "holobeam/matkit.hpp"
#include "holobeam/rates.hpp"
#include "holobeam/rhs_model.hpp"
#include "holobeam/subsolvers.hpp"
#include "holobeam/surrogates.hpp"
