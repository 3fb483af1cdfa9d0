#pragma once

#include "wolff/dyadic_kernel.hpp"
#include "wolff/radial_kernel.hpp"
#include "wolff/radial_profile.hpp"
