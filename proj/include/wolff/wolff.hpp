#pragma once

#include "wolff/continuous.hpp"
#include "wolff/dyadic_kernel.hpp"
#include "wolff/errors.hpp"
#include "wolff/extended.hpp"
#include "wolff/lattice.hpp"
#include "wolff/measures.hpp"
#include "wolff/parallel.hpp"
#include "wolff/potentials.hpp"
#include "wolff/radial_kernel.hpp"
#include "wolff/radial_profile.hpp"
#include "wolff/random.hpp"
#include "wolff/random_instances.hpp"
#include "wolff/verify.hpp"
