#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace botlab {

// Base of every error the library throws. kind() is a stable, machine-readable
// tag that the CLI prints on failure.
class Error : public std::runtime_error {
public:
    Error(std::string_view kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    [[nodiscard]] const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error("config", what) {}
};

// Target position coincides with the observer, so the bearing is undefined.
class SingularGeometryError : public Error {
public:
    explicit SingularGeometryError(const std::string& what) : Error("singular_geometry", what) {}
};

class ObservabilityError : public Error {
public:
    ObservabilityError(const std::string& what, double condition)
        : Error("observability", what), condition_(condition) {}

    [[nodiscard]] double condition() const noexcept { return condition_; }

private:
    double condition_;
};

class UnsupportedNoiseError : public Error {
public:
    explicit UnsupportedNoiseError(const std::string& what) : Error("unsupported_noise", what) {}
};

class EstimationError : public Error {
public:
    explicit EstimationError(const std::string& what) : Error("estimation", what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error("io", what) {}
};

}  // namespace botlab
