#pragma once

#include "fadof/calibrate.hpp"
#include "fadof/config.hpp"
#include "fadof/design.hpp"
#include "fadof/errors.hpp"
#include "fadof/io.hpp"
#include "fadof/physics.hpp"
#include "fadof/sellmeier.hpp"
#include "fadof/transfer.hpp"
#include "fadof/units.hpp"
