// Copyright 2026 The kconflict Authors.
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


#ifndef KCONFLICT_KCONFLICT_HPP_
#define KCONFLICT_KCONFLICT_HPP_

#include "kconflict/annotation.hpp"
#include "kconflict/answer_match.hpp"
#include "kconflict/augmentation.hpp"
#include "kconflict/catalog.hpp"
#include "kconflict/dataset.hpp"
#include "kconflict/entity_type.hpp"
#include "kconflict/error.hpp"
#include "kconflict/evaluation.hpp"
#include "kconflict/jsonl.hpp"
#include "kconflict/line_io.hpp"
#include "kconflict/mrqa.hpp"
#include "kconflict/parallel.hpp"
#include "kconflict/rng.hpp"
#include "kconflict/substitution.hpp"
#include "kconflict/text.hpp"

#endif  // KCONFLICT_KCONFLICT_HPP_
