#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lossbal {

/// Base of every failure raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A computation produced NaN or infinity. `tag` names the offending operation.
class NonFiniteError : public Error {
  public:
    NonFiniteError(std::string tag, const std::string& what) : Error(what), tag_(std::move(tag)) {}
    const std::string& tag() const { return tag_; }

  private:
    std::string tag_;
};

class UnboundVariableError : public Error {
  public:
    explicit UnboundVariableError(std::string name)
        : Error("variable '" + name + "' has no binding"), name_(std::move(name)) {}
    const std::string& name() const { return name_; }

  private:
    std::string name_;
};

/// A weighting strategy could not produce weights; `objective` is the culprit.
class StrategyError : public Error {
  public:
    StrategyError(std::size_t objective, const std::string& what)
        : Error(what + " (objective " + std::to_string(objective) + ")"), objective_(objective) {}
    std::size_t objective() const { return objective_; }

  private:
    std::size_t objective_;
};

/// Invalid run configuration. `line` is 0 when the error is not tied to a source line.
class ConfigError : public Error {
  public:
    ConfigError(std::string field, const std::string& what, int line = 0)
        : Error(format(field, what, line)), field_(std::move(field)), line_(line) {}
    const std::string& field() const { return field_; }
    int line() const { return line_; }

  private:
    static std::string format(const std::string& field, const std::string& what, int line) {
        std::string out;
        if (line > 0) out += "line " + std::to_string(line) + ": ";
        if (!field.empty()) out += "'" + field + "': ";
        return out + what;
    }
    std::string field_;
    int line_;
};

}  // namespace lossbal
