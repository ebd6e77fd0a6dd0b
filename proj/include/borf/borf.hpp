/*
 * Copyright 2026 The borf-cpp authors
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

#include "borf/approximation.hpp"
#include "borf/core.hpp"
#include "borf/explain.hpp"
#include "borf/linear.hpp"
#include "borf/normal.hpp"
#include "borf/parallel.hpp"
#include "borf/serialization.hpp"
#include "borf/sparse.hpp"
#include "borf/transform.hpp"
#include "borf/ts_format.hpp"
#include "borf/vocabulary.hpp"
#include "borf/windowing.hpp"
