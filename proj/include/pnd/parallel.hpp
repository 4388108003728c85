// Copyright 2026 The pnd Authors
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

#include <functional>

namespace pnd {

// Run body(i) for i in [0, n) on up to `threads` workers. Each index runs
// exactly once; callers store results by index so output order never depends
// on scheduling. The first exception is rethrown after all workers stop.
void parallel_for(int n, int threads, const std::function<void(int)>& body);

}  // namespace pnd
