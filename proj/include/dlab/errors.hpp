#pragma once

#include <stdexcept>
#include <string>

namespace dlab {

// Base for every library error. exit_code() is the CLI mapping.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
    virtual int exit_code() const { return 2; }
};

class DomainError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// Grid or node count insufficient for the requested accuracy.
class ResolutionError : public Error {
public:
    using Error::Error;
    int exit_code() const override { return 3; }
};

class ConvergenceError : public Error {
public:
    using Error::Error;
    int exit_code() const override { return 3; }
};

class ResourceError : public Error {
public:
    using Error::Error;
    int exit_code() const override { return 3; }
};

class DivergenceError : public Error {
public:
    using Error::Error;
    int exit_code() const override { return 3; }
};

}  // namespace dlab
