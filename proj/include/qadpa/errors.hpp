#pragma once

#include <stdexcept>
#include <string>

namespace qadpa {

// Error taxonomy. The CLI maps validation/parse errors to exit code 2 and
// numerical/singularity errors to exit code 3.
class error : public std::runtime_error {
 public:
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

class validation_error : public error {
 public:
  explicit validation_error(const std::string& what) : error(what) {}
};

class singularity_error : public error {
 public:
  explicit singularity_error(const std::string& what) : error(what) {}
};

class numerical_error : public error {
 public:
  explicit numerical_error(const std::string& what) : error(what) {}
};

class parse_error : public error {
 public:
  parse_error(const std::string& what, std::size_t line)
      : error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace qadpa
