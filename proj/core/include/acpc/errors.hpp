#pragma once

#include <stdexcept>
#include <string>

namespace acpc {

/// Base for every error raised by the simulator.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Scenario rejected during validation or parsing.
class ConfigError : public Error {
public:
    ConfigError(std::string field, std::string reason)
        : Error(field + ": " + reason), field_(std::move(field)), reason_(std::move(reason)) {}

    [[nodiscard]] const std::string& field() const noexcept { return field_; }
    [[nodiscard]] const std::string& reason() const noexcept { return reason_; }

private:
    std::string field_;
    std::string reason_;
};

class ChannelOff : public Error {
public:
    using Error::Error;
};

class StepTooLarge : public Error {
public:
    using Error::Error;
};

class NotThirdQuadrant : public Error {
public:
    using Error::Error;
};

class Timeout : public Error {
public:
    using Error::Error;
};

class OverdriveCollapse : public Error {
public:
    using Error::Error;
};

class Incomplete : public Error {
public:
    using Error::Error;
};

class DivideByZero : public Error {
public:
    using Error::Error;
};

class AmbientMismatch : public Error {
public:
    using Error::Error;
};

class UnknownKind : public Error {
public:
    using Error::Error;
};

/// DESAT or overcurrent protection ended a heating phase.
class ProtectionTrip : public Error {
public:
    ProtectionTrip(std::string what, double time_s, int device)
        : Error(std::move(what)), time_s_(time_s), device_(device) {}
    [[nodiscard]] double time_s() const noexcept { return time_s_; }
    [[nodiscard]] int device() const noexcept { return device_; }

private:
    double time_s_;
    int device_;
};

/// Junction temperature left the simulation envelope.
class ThermalRunaway : public Error {
public:
    ThermalRunaway(std::string what, double time_s, int device)
        : Error(std::move(what)), time_s_(time_s), device_(device) {}
    [[nodiscard]] double time_s() const noexcept { return time_s_; }
    [[nodiscard]] int device() const noexcept { return device_; }

private:
    double time_s_;
    int device_;
};

}  // namespace acpc
