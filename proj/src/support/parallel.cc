// Copyright 2026 The mmg Authors. All rights reserved.
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

#include "mmg/support/parallel.h"

#include <atomic>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mmg {
namespace {

std::atomic<bool> g_parallel_enabled{true};

}  // namespace

void SetParallelEnabled(bool enabled) { g_parallel_enabled.store(enabled); }

bool ParallelEnabled() {
#ifdef _OPENMP
  return g_parallel_enabled.load();
#else
  return false;
#endif
}

bool ParallelAvailable() {
#ifdef _OPENMP
  return true;
#else
  return false;
#endif
}

int ParallelThreadCount() {
#ifdef _OPENMP
  return ParallelEnabled() ? omp_get_max_threads() : 1;
#else
  return 1;
#endif
}

bool InParallelRegion() {
#ifdef _OPENMP
  return omp_in_parallel() != 0;
#else
  return false;
#endif
}

}  // namespace mmg
