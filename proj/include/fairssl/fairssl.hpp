/*
 * Copyright 2026 The fairssl authors.
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

#ifndef FAIRSSL_FAIRSSL_HPP
#define FAIRSSL_FAIRSSL_HPP

#include "fairssl/baselines.hpp"
#include "fairssl/common.hpp"
#include "fairssl/dataset.hpp"
#include "fairssl/decomposition.hpp"
#include "fairssl/fairness.hpp"
#include "fairssl/graph.hpp"
#include "fairssl/harness.hpp"
#include "fairssl/losses.hpp"
#include "fairssl/optim.hpp"
#include "fairssl/solver.hpp"
#include "fairssl/synthetic.hpp"

#endif  // FAIRSSL_FAIRSSL_HPP
