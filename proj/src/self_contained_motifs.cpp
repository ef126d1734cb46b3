// Compiles absorb/motifs.hpp on its own; a missing include breaks the build here.
#include "absorb/motifs.hpp"
