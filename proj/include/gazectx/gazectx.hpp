/*
 * Copyright 2026 The gazectx Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#define GAZECTX_VERSION "0.1.0"

#include "gazectx/analysis.hpp"
#include "gazectx/config.hpp"
#include "gazectx/context_vlm.hpp"
#include "gazectx/error.hpp"
#include "gazectx/experiments.hpp"
#include "gazectx/gaze.hpp"
#include "gazectx/geometry.hpp"
#include "gazectx/live_client.hpp"
#include "gazectx/oracles.hpp"
#include "gazectx/rng.hpp"
#include "gazectx/scene.hpp"
#include "gazectx/selftest.hpp"
#include "gazectx/synthgen.hpp"
#include "gazectx/types.hpp"
