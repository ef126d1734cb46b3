// Compiles absorb.hpp on its own; a missing include breaks the build here.
#include "absorb.hpp"
