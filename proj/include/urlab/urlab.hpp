// Umbrella header.
#pragma once

#include "urlab/agents.hpp"
#include "urlab/core.hpp"
#include "urlab/dirichlet.hpp"
#include "urlab/distribution.hpp"
#include "urlab/expectimax.hpp"
#include "urlab/gridworld.hpp"
#include "urlab/harness.hpp"
#include "urlab/known_grid.hpp"
#include "urlab/mixture.hpp"
#include "urlab/model.hpp"
#include "urlab/oracle.hpp"
#include "urlab/planner.hpp"
#include "urlab/random.hpp"
#include "urlab/stats.hpp"
