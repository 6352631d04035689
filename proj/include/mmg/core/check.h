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

#ifndef MMG_CORE_CHECK_H_
#define MMG_CORE_CHECK_H_

#include <sstream>
#include <stdexcept>
#include <string>

namespace mmg {

// Violated input contract (dimension mismatch, out-of-range argument, ...).
class ContractViolation : public std::runtime_error {
 public:
  explicit ContractViolation(const std::string& what)
      : std::runtime_error(what) {}
};

// Numerical failure inside an algorithm (singular stage system, divergence,
// non-finite quantities).  Carries the timestep where it occurred when known.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what, int timestep = -1)
      : std::runtime_error(what), timestep_(timestep) {}
  int timestep() const { return timestep_; }

 private:
  int timestep_;
};

// A requested tolerance could not be met (e.g. quadrature refinement hit its
// point budget before the normalization drift bound).
class PrecisionError : public std::runtime_error {
 public:
  explicit PrecisionError(const std::string& what)
      : std::runtime_error(what) {}
};

namespace internal {

[[noreturn]] inline void ThrowContract(const char* cond, const char* file,
                                       int line, const std::string& msg) {
  std::ostringstream oss;
  oss << file << ":" << line << ": check failed: " << cond;
  if (!msg.empty()) oss << " (" << msg << ")";
  throw ContractViolation(oss.str());
}

}  // namespace internal
}  // namespace mmg

#define MMG_CHECK(cond)                                                \
  do {                                                                 \
    if (!(cond))                                                       \
      ::mmg::internal::ThrowContract(#cond, __FILE__, __LINE__, "");   \
  } while (0)

#define MMG_CHECK_MSG(cond, msg)                                       \
  do {                                                                 \
    if (!(cond)) {                                                     \
      std::ostringstream mmg_oss_;                                     \
      mmg_oss_ << msg;                                                 \
      ::mmg::internal::ThrowContract(#cond, __FILE__, __LINE__,        \
                                     mmg_oss_.str());                  \
    }                                                                  \
  } while (0)

#endif  // MMG_CORE_CHECK_H_
