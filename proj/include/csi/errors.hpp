#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace csi {

// Base class for all structured errors raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---- data errors -----------------------------------------------------------

class EmptyCorpus : public Error {
public:
    EmptyCorpus() : Error("EmptyCorpus: token stream contains no tokens") {}
};

class ShortCorpus : public Error {
public:
    ShortCorpus(std::size_t requested, std::size_t achievable)
        : Error("ShortCorpus: requested " + std::to_string(requested) +
                " entries but only " + std::to_string(achievable) + " distinct words available"),
          requested(requested),
          achievable(achievable) {}
    std::size_t requested;
    std::size_t achievable;
};

class ParseError : public Error {
public:
    ParseError(std::string message, std::size_t line)
        : Error("ParseError at line " + std::to_string(line) + ": " + message), line(line) {}
    std::size_t line;
};

class ShapeError : public Error {
public:
    explicit ShapeError(const std::string& message) : Error("ShapeError: " + message) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& message) : Error("ConfigError: " + message) {}
};

class InsufficientWords : public Error {
public:
    InsufficientWords(std::string partition, std::size_t needed, std::size_t have)
        : Error("InsufficientWords: partition '" + partition + "' needs " +
                std::to_string(needed) + " words, has " + std::to_string(have)),
          partition(std::move(partition)),
          needed(needed),
          have(have) {}
    std::string partition;
    std::size_t needed;
    std::size_t have;
};

class MissingArtifact : public Error {
public:
    explicit MissingArtifact(std::string stage)
        : Error("MissingArtifact: run directory is missing the '" + stage + "' artifact"),
          stage(std::move(stage)) {}
    std::string stage;
};

// ---- model client errors ---------------------------------------------------

class ClientError : public Error {
public:
    using Error::Error;
};

class AuthError : public ClientError {
public:
    explicit AuthError(const std::string& message) : ClientError("AuthError: " + message) {}
};

class RateLimited : public ClientError {
public:
    explicit RateLimited(const std::string& message) : ClientError("RateLimited: " + message) {}
};

class Timeout : public ClientError {
public:
    explicit Timeout(const std::string& message) : ClientError("Timeout: " + message) {}
};

class MalformedResponse : public ClientError {
public:
    explicit MalformedResponse(const std::string& message)
        : ClientError("MalformedResponse: " + message) {}
};

// ---- judge response errors -------------------------------------------------

class NoJsonFound : public Error {
public:
    NoJsonFound() : Error("NoJsonFound: response contains no JSON object with both degree keys") {}
};

class DegreeOutOfRange : public Error {
public:
    explicit DegreeOutOfRange(double value)
        : Error("DegreeOutOfRange: degree " + std::to_string(value) + " outside [1,10]"),
          value(value) {}
    double value;
};

}  // namespace csi
