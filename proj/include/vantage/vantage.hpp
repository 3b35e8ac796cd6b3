// Copyright 2026 The Vantage Authors.
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

#include "vantage/bvh.hpp"
#include "vantage/error.hpp"
#include "vantage/geometry.hpp"
#include "vantage/image_filters.hpp"
#include "vantage/image_io.hpp"
#include "vantage/objectives.hpp"
#include "vantage/parallel.hpp"
#include "vantage/planner.hpp"
#include "vantage/rng.hpp"
#include "vantage/scenegen.hpp"
#include "vantage/serialization.hpp"
#include "vantage/visibility.hpp"
