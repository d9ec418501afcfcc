#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace coa {

/// Base of every error raised by the engine.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// text_budget
class SingleUnitOverflow : public Error {
public:
    using Error::Error;
};

class BudgetExhausted : public Error {
public:
    using Error::Error;
};

// prompt assembly
class TemplateOverflow : public Error {
public:
    using Error::Error;
};

/// Any failure of a generation backend.
class BackendError : public Error {
public:
    using Error::Error;
};

/// Prompt longer than the backend window. Always an upstream bug.
class ContextOverflow : public BackendError {
public:
    using BackendError::BackendError;
};

class TransientExhausted : public BackendError {
public:
    using BackendError::BackendError;
};

class CacheMiss : public BackendError {
public:
    using BackendError::BackendError;
};

/// The scripted oracle could not find the template sections it expects.
class MalformedPrompt : public BackendError {
public:
    using BackendError::BackendError;
};

/// A sub-operation of a pipeline failed; records which agent was running.
class AgentFailure : public Error {
public:
    enum class Cause { backend, template_overflow };

    AgentFailure(std::string role, std::size_t agent_index, const std::string& what, Cause cause = Cause::backend)
        : Error(role + " " + std::to_string(agent_index) + ": " + what),
          role_(std::move(role)),
          agent_index_(agent_index),
          cause_(cause) {}

    const std::string& role() const noexcept { return role_; }
    std::size_t agent_index() const noexcept { return agent_index_; }
    Cause cause() const noexcept { return cause_; }

private:
    std::string role_;
    std::size_t agent_index_;
    Cause cause_;
};

class SpecInfeasible : public Error {
public:
    using Error::Error;
};

class MissingReferences : public Error {
public:
    using Error::Error;
};

class SchemaError : public Error {
public:
    SchemaError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class EmptyDataset : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace coa
