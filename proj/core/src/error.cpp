#include "ocdmd/error.hpp"

namespace ocdmd {

ParseError::ParseError(const std::string& file, std::size_t line,
                       const std::string& what)
    : Error(ErrorCategory::Data,
            file + ":" + std::to_string(line) + ": " + what) {}

}  // namespace ocdmd
