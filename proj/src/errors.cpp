#include "czx/errors.hpp"

namespace czx {

const char* version() { return CZX_VERSION_STRING; }

}  // namespace czx
