// Compiles absorb/errors.hpp on its own; a missing include breaks the build here.
#include "absorb/errors.hpp"
