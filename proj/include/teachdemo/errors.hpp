#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace teachdemo {

// Every library error derives from Error so callers (the CLI in particular)
// can separate domain failures from programming errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class RangeError : public Error {
public:
    using Error::Error;
};

class MalformedAction : public Error {
public:
    MalformedAction(std::size_t token_index, const std::string& what)
        : Error(what), token_index_(token_index) {}
    std::size_t token_index() const noexcept { return token_index_; }

private:
    std::size_t token_index_;
};

class UnrecognizedTemplate : public Error {
public:
    using Error::Error;
};

class MalformedEncoding : public Error {
public:
    using Error::Error;
};

class MissingFinalNoOp : public Error {
public:
    using Error::Error;
};

class EmptyOperand : public Error {
public:
    using Error::Error;
};

class OddLineCount : public Error {
public:
    using Error::Error;
};

class InsufficientPool : public Error {
public:
    using Error::Error;
};

class GeneratorUnavailable : public Error {
public:
    using Error::Error;
};

class UnparseablePrefix : public Error {
public:
    using Error::Error;
};

class OracleUnavailable : public Error {
public:
    using Error::Error;
};

class ProtocolError : public Error {
public:
    using Error::Error;
};

// Connection failures, timeouts and peer hang-ups on a byte stream.
class TransportError : public Error {
public:
    using Error::Error;
};

}  // namespace teachdemo
