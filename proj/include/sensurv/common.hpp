#pragma once

#include <stdexcept>
#include <string>

namespace sensurv {

// Error taxonomy. DataError covers malformed inputs (CLI exit code 3),
// NumericError covers estimation/optimization failures (exit code 4).
// code() carries a stable identifier such as "NonNumericValue" so callers
// and tests can dispatch without parsing messages.
class Error : public std::runtime_error {
 public:
  enum class Category { Data, Numeric, Config };

  Error(Category cat, std::string code, const std::string& message)
      : std::runtime_error(message), category_(cat), code_(std::move(code)) {}

  Category category() const { return category_; }
  const std::string& code() const { return code_; }

 private:
  Category category_;
  std::string code_;
};

inline Error data_error(const std::string& code, const std::string& msg) {
  return Error(Error::Category::Data, code, msg);
}
inline Error numeric_error(const std::string& code, const std::string& msg) {
  return Error(Error::Category::Numeric, code, msg);
}
inline Error config_error(const std::string& code, const std::string& msg) {
  return Error(Error::Category::Config, code, msg);
}

}  // namespace sensurv
