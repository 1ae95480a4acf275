#pragma once

#include <stdexcept>
#include <string>

namespace stripe {

/// Base class of every error raised by the solver suite.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidParams : public Error {
public:
    using Error::Error;
};

/// A trajectory left the box |v|,|w| <= bound.
class BlowUp : public Error {
public:
    using Error::Error;
};

class NoNontrivialProfile : public Error {
public:
    using Error::Error;
};

class PositivityViolation : public Error {
public:
    using Error::Error;
};

class BracketFailure : public Error {
public:
    using Error::Error;
};

class SignPatternViolation : public Error {
public:
    using Error::Error;
};

class FoldTooClose : public Error {
public:
    using Error::Error;
};

class NonConvergence : public Error {
public:
    using Error::Error;
};

class NoInterface : public Error {
public:
    using Error::Error;
};

/// Time step above the stability / monotonicity bound of a scheme.
class StepTooLarge : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace stripe
