/*
 * Copyright 2026 The urtree Authors.
 *
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

#ifndef URTREE_ERROR_HPP_
#define URTREE_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace urtree {

// Every failure raised by the library. Messages are stable and are matched
// by tests and surfaced verbatim by the command line tool.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Bad arguments or flags supplied by a caller (maps to exit code 2 in the CLI).
class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(what) {}
};

}  // namespace urtree

#endif  // URTREE_ERROR_HPP_
