#pragma once

#include <stdexcept>
#include <string>

namespace asmplan {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class NonManifold : public Error {
public:
    using Error::Error;
};

class PenetrationError : public Error {
public:
    PenetrationError(const std::string& what, double depth)
        : Error(what), depth_(depth) {}
    double depth() const noexcept { return depth_; }

private:
    double depth_;
};

class EmptyNormals : public Error {
public:
    using Error::Error;
};

class TooManyParts : public Error {
public:
    using Error::Error;
};

class SchemaError : public Error {
public:
    using Error::Error;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class UnknownScene : public Error {
public:
    using Error::Error;
};

class DisconnectedVoxels : public Error {
public:
    using Error::Error;
};

class InconsistentPlan : public Error {
public:
    using Error::Error;
};

}  // namespace asmplan
