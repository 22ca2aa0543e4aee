#pragma once

#include "types.hpp"
#include "linalg.hpp"
#include "hs_core.hpp"
#include "family.hpp"
#include "frame.hpp"
#include "projection.hpp"
#include "perturbation.hpp"
#include "generators.hpp"
#include "io.hpp"
