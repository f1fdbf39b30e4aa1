// Copyright 2026 The qcirc Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace qcirc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Operand shapes do not fit the operation (e.g. multiplying 2x3 by 2x2).
class DimensionError : public Error {
   public:
    using Error::Error;
};

/// A caller-supplied argument violates an operation's precondition.
class InvalidArgument : public Error {
   public:
    using Error::Error;
};

/// A gate id, register index or label does not exist in the circuit.
class UnknownName : public Error {
   public:
    using Error::Error;
};

}  // namespace qcirc
