// Copyright 2026 The mprho Authors
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

namespace mprho {

/// Base class of every exception thrown by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed tensor labels: duplicates, unknown names, bad dims.
struct LabelError : Error {
    using Error::Error;
};

/// Shared label names with unequal dimensions.
struct ContractionError : Error {
    using Error::Error;
};

/// Empty or full row set handed to a matrix decomposition.
struct PartitionError : Error {
    using Error::Error;
};

/// Merge/split whose dimension products disagree.
struct ReshapeError : Error {
    using Error::Error;
};

/// Singular gauge matrix or non-isometric mixture transformation.
struct GaugeError : Error {
    using Error::Error;
};

/// Site or bond index out of range, or chains of unequal length.
struct RangeError : Error {
    using Error::Error;
};

/// Invalid channel parameters or arity mismatch.
struct ChannelError : Error {
    using Error::Error;
};

/// Dense-oracle refusal: size cap exceeded or input outside the PSD cone.
struct OracleError : Error {
    using Error::Error;
};

/// Malformed input text (circuit files, checkpoints, Pauli strings).
struct ParseError : Error {
    using Error::Error;
};

/// Invalid experiment configuration.
struct ConfigError : Error {
    using Error::Error;
};

/// A runtime post-condition violated under --strict.
struct StrictCheckError : Error {
    using Error::Error;
};

}  // namespace mprho
