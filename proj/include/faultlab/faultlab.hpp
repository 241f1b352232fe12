/*
 * Copyright 2026 The faultlab Authors.
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

#ifndef FAULTLAB_FAULTLAB_HPP_
#define FAULTLAB_FAULTLAB_HPP_

#include "faultlab/ckks.hpp"
#include "faultlab/errors.hpp"
#include "faultlab/fault.hpp"
#include "faultlab/harness.hpp"
#include "faultlab/metrics.hpp"
#include "faultlab/random.hpp"
#include "faultlab/ring_arith.hpp"
#include "faultlab/rns.hpp"
#include "faultlab/transforms.hpp"

#endif  // FAULTLAB_FAULTLAB_HPP_
