#pragma once

#include "absorb/errors.hpp"
#include "absorb/numerics.hpp"
#include "absorb/graph.hpp"
#include "absorb/forests.hpp"
#include "absorb/inverses.hpp"
#include "absorb/structure.hpp"
#include "absorb/motifs.hpp"
#include "absorb/io.hpp"
