#pragma once

#include "rotsense/cli.hpp"
#include "rotsense/config.hpp"
#include "rotsense/dynamics.hpp"
#include "rotsense/ensemble.hpp"
#include "rotsense/error.hpp"
#include "rotsense/meanfield.hpp"
#include "rotsense/model.hpp"
#include "rotsense/output.hpp"
#include "rotsense/parallel.hpp"
#include "rotsense/protocols.hpp"
#include "rotsense/rng.hpp"
#include "rotsense/schedule.hpp"
#include "rotsense/spectrum.hpp"
#include "rotsense/sweep.hpp"
#include "rotsense/units.hpp"
#include "rotsense/version.hpp"
