#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace truetop {

using UserId = std::string;
using NodeIndex = std::uint32_t;

/// Base of every error raised by the library. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Unreadable or unwritable file/stream.
class IoError : public Error {
public:
    using Error::Error;
};

/// Invalid input data or parameters.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Not enough verified users to pick the requested seeds.
class SeedingError : public Error {
public:
    using Error::Error;
};

/// Attack scenario cannot be realized on the given graph.
class ScenarioError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Shortest decimal string that parses back to exactly `value`.
std::string format_double(double value);

/// Strict parse of a whole string; throws ValidationError on trailing garbage.
double parse_double(std::string_view text);
std::int64_t parse_int64(std::string_view text);

/// Splits on `sep` without trimming; empty fields are kept.
std::vector<std::string_view> split(std::string_view text, char sep);

std::string_view trim(std::string_view text);

/// Neumaier-compensated sum.
double compensated_sum(std::span<const double> values);

double l1_distance(std::span<const double> a, std::span<const double> b);

} // namespace truetop
