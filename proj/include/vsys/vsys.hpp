// vsys.hpp — Umbrella header

#pragma once

#include "vsys/analytic.hpp"
#include "vsys/core.hpp"
#include "vsys/errors.hpp"
#include "vsys/generator.hpp"
#include "vsys/io.hpp"
#include "vsys/propagate.hpp"
#include "vsys/regime.hpp"
#include "vsys/spectral.hpp"
#include "vsys/sweep.hpp"
#include "vsys/version.hpp"
