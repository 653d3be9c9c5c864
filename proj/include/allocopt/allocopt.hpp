#pragma once

// Umbrella header for the allocation optimizer library.

#include "allocopt/binomial.hpp"
#include "allocopt/errors.hpp"
#include "allocopt/json_io.hpp"
#include "allocopt/memory_limited.hpp"
#include "allocopt/multi_object.hpp"
#include "allocopt/numeric.hpp"
#include "allocopt/oracle.hpp"
#include "allocopt/parallel.hpp"
#include "allocopt/relaxation.hpp"
