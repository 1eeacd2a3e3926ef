// Copyright 2026 The bosonsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "bosonsim/complexity.hpp"
#include "bosonsim/error.hpp"
#include "bosonsim/exact.hpp"
#include "bosonsim/gray_code.hpp"
#include "bosonsim/matrix.hpp"
#include "bosonsim/permanent.hpp"
#include "bosonsim/port_statistics.hpp"
#include "bosonsim/rng.hpp"
#include "bosonsim/sampler.hpp"
#include "bosonsim/stats.hpp"
