#pragma once

#include "med/error.hpp"
#include "med/rng.hpp"
#include "med/topology.hpp"
#include "med/protocol.hpp"
#include "med/markov.hpp"
#include "med/latency.hpp"
#include "med/montecarlo.hpp"
#include "med/config.hpp"
#include "med/commands.hpp"
