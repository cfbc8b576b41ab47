#pragma once
#include <stdexcept>
#include <string>
#include <vector>

namespace mfsi {

enum class ErrorKind {
  InvalidConfig,
  SmallnessViolation,
  PicardDivergence,
  MaxitExceeded,
  SingularSystem,
  DofBudget,
  Numerical,
};

const char* reason_string(ErrorKind k);
int exit_code(ErrorKind k);

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }
  const char* reason() const { return reason_string(kind_); }

private:
  ErrorKind kind_;
};

class ConfigError : public Error {
public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

private:
  std::vector<std::string> violations_;
};

class SmallnessError : public Error {
public:
  SmallnessError(double max_abs, double delta0, int sample);
  double max_abs, delta0;
  int sample;
};

}  // namespace mfsi
