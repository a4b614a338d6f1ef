#pragma once

#include "contagion/error.hpp"
#include "contagion/model.hpp"
#include "contagion/root_vector.hpp"
#include "contagion/compound_poisson.hpp"
#include "contagion/analytic.hpp"
#include "contagion/solver.hpp"
#include "contagion/resilience.hpp"
#include "contagion/rootset.hpp"
#include "contagion/rng.hpp"
#include "contagion/graph.hpp"
#include "contagion/cascade.hpp"
#include "contagion/montecarlo.hpp"
