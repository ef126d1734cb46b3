// Compiles absorb/io.hpp on its own; a missing include breaks the build here.
#include "absorb/io.hpp"
