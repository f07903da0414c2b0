#include "sgnls/errors.hpp"

namespace sgnls {

BlowUpError::BlowUpError(const std::string& what, double last_valid_time)
    : Error(what), last_valid_time_(last_valid_time) {}

}  // namespace sgnls
