#pragma once

#include "flock/analysis.hpp"
#include "flock/dynamics.hpp"
#include "flock/errors.hpp"
#include "flock/graphs.hpp"
#include "flock/potentials.hpp"
#include "flock/rng.hpp"
#include "flock/scenario.hpp"
#include "flock/simulate.hpp"
#include "flock/svg_plot.hpp"
#include "flock/trajectory_io.hpp"
