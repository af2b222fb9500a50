#pragma once

#include "fusedlasso/coordinate.hpp"
#include "fusedlasso/error.hpp"
#include "fusedlasso/flow.hpp"
#include "fusedlasso/fusion.hpp"
#include "fusedlasso/glm.hpp"
#include "fusedlasso/graph.hpp"
#include "fusedlasso/huber.hpp"
#include "fusedlasso/partition.hpp"
#include "fusedlasso/path.hpp"
#include "fusedlasso/problem.hpp"
#include "fusedlasso/rng.hpp"
#include "fusedlasso/simgen.hpp"
#include "fusedlasso/solve.hpp"
#include "fusedlasso/verify.hpp"
