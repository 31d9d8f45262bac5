#include "actirehab/error.hpp"

#include <utility>

namespace actirehab {

Error::Error(ErrorClass cls, std::string code, const std::string& message)
    : std::runtime_error(code + ": " + message), class_(cls), code_(std::move(code)), detail_(message) {}

}  // namespace actirehab
