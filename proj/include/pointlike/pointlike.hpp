#pragma once

#include "pointlike/composite_chain.hpp"
#include "pointlike/config.hpp"
#include "pointlike/dynamics.hpp"
#include "pointlike/errors.hpp"
#include "pointlike/experiments.hpp"
#include "pointlike/finite_range_solver.hpp"
#include "pointlike/pointlike_spectrum.hpp"
#include "pointlike/regulated_potential.hpp"
