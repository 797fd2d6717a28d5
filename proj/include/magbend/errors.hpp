#pragma once

#include <stdexcept>
#include <string>

namespace magbend {

// Bad sweep/spec configuration detected before any numerics run.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Filesystem / stream failures, carrying path context in the message.
class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

// Image contains no usable continuum pixels, or too many ambiguous columns.
class extraction_error : public std::runtime_error {
public:
    explicit extraction_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace magbend
