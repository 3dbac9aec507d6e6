#pragma once

// Umbrella header.

#include "normext/coefficients.hpp"
#include "normext/config.hpp"
#include "normext/evolution.hpp"
#include "normext/extensions.hpp"
#include "normext/gridfn.hpp"
#include "normext/snumbers.hpp"
#include "normext/spectral.hpp"
#include "normext/transforms.hpp"
#include "normext/weights.hpp"
