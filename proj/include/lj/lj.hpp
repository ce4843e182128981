#pragma once

#include "lj/configurations.hpp"
#include "lj/errors.hpp"
#include "lj/integrator.hpp"
#include "lj/potential.hpp"
#include "lj/radial.hpp"
#include "lj/roots.hpp"
#include "lj/thresholds.hpp"
#include "lj/vec.hpp"
#include "lj/verify.hpp"
