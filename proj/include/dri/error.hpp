#ifndef DRI_ERROR_HPP
#define DRI_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dri {

/// Base of every error raised by the library. Callers that only need to
/// distinguish "the pipeline failed" from success can catch this.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class MissingColumn : public Error {
public:
    explicit MissingColumn(std::string column)
        : Error("missing column '" + column + "'"), column_(std::move(column)) {}
    const std::string& column() const noexcept { return column_; }

private:
    std::string column_;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, std::string column, std::string raw, const std::string& why = {})
        : Error("line " + std::to_string(line) + ", column '" + column + "': cannot convert '" + raw + "'" +
                (why.empty() ? std::string{} : " (" + why + ")")),
          line_(line), column_(std::move(column)), raw_(std::move(raw)) {}

    std::size_t line() const noexcept { return line_; }
    const std::string& column() const noexcept { return column_; }
    const std::string& raw() const noexcept { return raw_; }

private:
    std::size_t line_;
    std::string column_;
    std::string raw_;
};

class DuplicateFips : public Error {
public:
    explicit DuplicateFips(std::string fips) : Error("duplicate FIPS " + fips), fips_(std::move(fips)) {}
    const std::string& fips() const noexcept { return fips_; }

private:
    std::string fips_;
};

class GeometryError : public Error {
public:
    using Error::Error;
};

class EmptyJoin : public Error {
public:
    EmptyJoin() : Error("no FIPS code is present in both the SVI and income tables") {}
};

class DegenerateDomain : public Error {
public:
    using Error::Error;
};

class InvalidK : public Error {
public:
    explicit InvalidK(long k) : Error("class count must be >= 2, got " + std::to_string(k)) {}
};

class LabelMismatch : public Error {
public:
    LabelMismatch(std::size_t labels, std::size_t k)
        : Error(std::to_string(labels) + " class labels supplied for " + std::to_string(k) + " classes") {}
};

class InsufficientData : public Error {
public:
    using Error::Error;
};

class ConstantInput : public Error {
public:
    using Error::Error;
};

class ClassCountMismatch : public Error {
public:
    using Error::Error;
};

class SinkError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace dri

#endif  // DRI_ERROR_HPP
