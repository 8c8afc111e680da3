#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace patmine {

/// Base of every error raised by the library. Callers that only need a
/// diagnostic string can catch this.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IngestError : public Error {
public:
    using Error::Error;
};

class DuplicatePathError : public Error {
public:
    using Error::Error;
};

class UnknownLabelError : public Error {
public:
    using Error::Error;
};

class MissingFileError : public Error {
public:
    using Error::Error;
};

class LabelsNotFound : public Error {
public:
    using Error::Error;
};

class SyntaxError : public Error {
public:
    SyntaxError(const std::string& what, std::size_t line, std::size_t column)
        : Error(what + " at " + std::to_string(line) + ":" + std::to_string(column)),
          line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

class UnknownMethodError : public Error {
public:
    using Error::Error;
};

class EmptyVocabularyError : public Error {
public:
    using Error::Error;
};

class ZeroVectorError : public Error {
public:
    using Error::Error;
};

class EmptyTrainingError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class StratificationInfeasibleError : public Error {
public:
    using Error::Error;
};

class SmoteInfeasibleError : public Error {
public:
    using Error::Error;
};

class DegenerateMarginals : public Error {
public:
    using Error::Error;
};

class BundleFormatError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// A pipeline stage failed; `stage()` names it.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& what)
        : Error("stage '" + stage + "' failed: " + what), stage_(std::move(stage)) {}

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

}  // namespace patmine
