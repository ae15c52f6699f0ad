// Copyright (C) 2025 The tokprune Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tokprune {

/// Base of every error raised by the library. Callers that only need to tell
/// "bad data" from "bad usage" can catch this one type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A feature row (or a standalone vector) has zero Euclidean norm.
class DegenerateVectorError : public Error {
public:
    DegenerateVectorError(const std::string& what, std::size_t index)
        : Error(what), m_index(index) {}
    std::size_t index() const noexcept { return m_index; }

private:
    std::size_t m_index;
};

/// Requested budget K is outside [1, n_tokens].
class BudgetError : public Error {
public:
    using Error::Error;
};

/// Importance vector and feature matrix disagree on the number of tokens.
class PairingError : public Error {
public:
    using Error::Error;
};

/// An argument is outside the mathematical domain of the operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Non-finite values, duplicate indices and similar content problems.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Binary or CSV file does not follow its declared layout. `offset` is a byte
/// offset for binary files and a 1-based line number for text files.
class FormatError : public Error {
public:
    FormatError(const std::string& what, std::uint64_t offset)
        : Error(what), m_offset(offset) {}
    std::uint64_t offset() const noexcept { return m_offset; }

private:
    std::uint64_t m_offset;
};

/// Structured-text document could not be parsed.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::uint64_t byte_position)
        : Error(what), m_position(byte_position) {}
    std::uint64_t position() const noexcept { return m_position; }

private:
    std::uint64_t m_position;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Sum of importance scores is zero so a ratio is undefined.
class UndefinedRatioError : public Error {
public:
    using Error::Error;
};

/// All nearest-neighbour distances vanish (Hopkins denominator is zero).
class DegenerateGeometryError : public Error {
public:
    using Error::Error;
};

/// DPP kernel has a conditional variance below -jitter.
class KernelConditioningError : public Error {
public:
    using Error::Error;
};

}  // namespace tokprune
