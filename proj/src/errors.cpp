#include "nlsa/errors.hpp"

namespace nlsa {

ConfigError::ConfigError(std::string path, const std::string& what)
    : Error(path + ": " + what), path_(std::move(path)) {}

}  // namespace nlsa
