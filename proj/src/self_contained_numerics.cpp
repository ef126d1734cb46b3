// Compiles absorb/numerics.hpp on its own; a missing include breaks the build here.
#include "absorb/numerics.hpp"
