// Compiles absorb/inverses.hpp on its own; a missing include breaks the build here.
#include "absorb/inverses.hpp"
