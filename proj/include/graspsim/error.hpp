#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace graspsim {

// Root of the library's exception hierarchy. what() is prefixed with the
// owning module, e.g. "traj: ...".
class Error : public std::runtime_error {
public:
    Error(const std::string& module, const std::string& message)
        : std::runtime_error(module + ": " + message), module_(module) {}

    const std::string& module() const noexcept { return module_; }

private:
    std::string module_;
};

class BoundsUnsatisfiable : public Error {
public:
    BoundsUnsatisfiable(std::size_t segment, const std::string& message)
        : Error("traj", message), segment_(segment) {}
    std::size_t segment() const noexcept { return segment_; }

private:
    std::size_t segment_;
};

class OutOfRange : public Error {
public:
    explicit OutOfRange(const std::string& message) : Error("traj", message) {}
};

class SpeedExceedsPlatform : public Error {
public:
    explicit SpeedExceedsPlatform(const std::string& message) : Error("traj", message) {}
};

class SyntaxError : public Error {
public:
    SyntaxError(std::size_t line, std::size_t column, const std::string& message)
        : Error("gcode", "line " + std::to_string(line) + ", column " + std::to_string(column) +
                             ": " + message),
          line_(line),
          column_(column),
          message_(message) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }
    const std::string& message() const noexcept { return message_; }

private:
    std::size_t line_;
    std::size_t column_;
    std::string message_;
};

class PlanError : public Error {
public:
    explicit PlanError(const std::string& message) : Error("gcode", message) {}
};

class GoalOutsideView : public Error {
public:
    explicit GoalOutsideView(const std::string& message) : Error("percept", message) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& message) : Error("config", message) {}
};

class IoError : public Error {
public:
    IoError(const std::string& module, const std::string& message) : Error(module, message) {}
};

}  // namespace graspsim
