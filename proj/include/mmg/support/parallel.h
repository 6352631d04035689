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
//
// Process-wide switch between the OpenMP kernels and their serial reference.
// Every parallel loop in the library writes disjoint output slots, so the two
// execution modes produce bit-identical results; tests assert this and the
// benchmark tool compares their speed.

#ifndef MMG_SUPPORT_PARALLEL_H_
#define MMG_SUPPORT_PARALLEL_H_

namespace mmg {

// Enables or disables the OpenMP execution of the library's parallel kernels.
// Defaults to enabled when the build has OpenMP, otherwise always serial.
void SetParallelEnabled(bool enabled);
bool ParallelEnabled();

// True when the build has OpenMP support compiled in.
bool ParallelAvailable();

// Number of threads the parallel kernels would use right now (1 when serial).
int ParallelThreadCount();

// True inside an active OpenMP parallel region; kernels use this to avoid
// forking nested teams.
bool InParallelRegion();

}  // namespace mmg

#endif  // MMG_SUPPORT_PARALLEL_H_
