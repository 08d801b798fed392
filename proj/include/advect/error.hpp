#pragma once

#include <stdexcept>
#include <string>

namespace advect {

/// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad user configuration: unknown period, invalid parameter, unmapped file.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A file could not be opened or read.
class IngestError : public Error {
public:
    using Error::Error;
};

/// Malformed input; carries the offending line number when known.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Unknown word or period.
class LookupError : public Error {
public:
    using Error::Error;
};

/// The word did not reach the occurrence threshold in the requested period.
class BelowThresholdError : public LookupError {
public:
    BelowThresholdError(const std::string& word, const std::string& period)
        : LookupError("'" + word + "' is below the occurrence threshold in period " + period),
          word_(word), period_(period) {}
    const std::string& word() const noexcept { return word_; }
    const std::string& period() const noexcept { return period_; }

private:
    std::string word_;
    std::string period_;
};

/// Not enough preceding periods to build an advection history.
class InsufficientHistoryError : public Error {
public:
    using Error::Error;
};

/// A pipeline step ran before the artifact it needs was produced.
class MissingArtifactError : public Error {
public:
    using Error::Error;
};

} // namespace advect
