// Copyright 2026 The omas Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef OMAS_OMAS_HPP
#define OMAS_OMAS_HPP

#include "omas/bounds.hpp"
#include "omas/error.hpp"
#include "omas/graph.hpp"
#include "omas/io.hpp"
#include "omas/parallel.hpp"
#include "omas/protocols.hpp"
#include "omas/random.hpp"
#include "omas/scenario.hpp"
#include "omas/signals.hpp"
#include "omas/simulator.hpp"
#include "omas/size_estimation.hpp"
#include "omas/special_functions.hpp"

#endif  // OMAS_OMAS_HPP
