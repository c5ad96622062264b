// rabi2.hpp: umbrella header for the two-photon Rabi model solvers

#pragma once

#include "rabi2/model.hpp"
#include "rabi2/tridiagonal.hpp"
#include "rabi2/exact_solver.hpp"
#include "rabi2/grid.hpp"
#include "rabi2/gaussian_kernels.hpp"
#include "rabi2/nelder_mead.hpp"
#include "rabi2/polaron.hpp"
#include "rabi2/observables.hpp"
#include "rabi2/potential.hpp"
