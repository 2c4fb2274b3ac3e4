// Copyright (c) 2026 connsearch contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace connsearch {

// Error taxonomy shared by every module. The CLI maps these onto exit codes
// (argument/format during config resolution -> 1, dataset I/O -> 2,
// non-finite numerics -> 3).
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ShapeError : Error {
    using Error::Error;
};
struct ArgumentError : Error {
    using Error::Error;
};
struct DomainError : Error {
    using Error::Error;
};
struct IoError : Error {
    using Error::Error;
};
struct FormatError : Error {
    using Error::Error;
};
struct StateError : Error {
    using Error::Error;
};
struct NumericError : Error {
    using Error::Error;
};
// Thrown when an enumeration request exceeds the configured cap.
struct RefusalError : Error {
    using Error::Error;
};
// Thrown by diagnostics when a metric has no data to aggregate.
struct DiagnosticError : Error {
    using Error::Error;
};

}  // namespace connsearch
