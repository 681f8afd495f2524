#pragma once

#include "sagsim/config.hpp"
#include "sagsim/contacts.hpp"
#include "sagsim/errors.hpp"
#include "sagsim/geometry.hpp"
#include "sagsim/io.hpp"
#include "sagsim/matching.hpp"
#include "sagsim/rng.hpp"
#include "sagsim/scenario.hpp"
#include "sagsim/simulation.hpp"
#include "sagsim/validate.hpp"
