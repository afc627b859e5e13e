#pragma once

// Meshless generalized finite difference solver for the stochastic heat
// equation dv = rho lap(v) dt + mu v dW on scattered point clouds.

#include "gfdm/cloud_io.hpp"
#include "gfdm/config.hpp"
#include "gfdm/ensemble.hpp"
#include "gfdm/errors.hpp"
#include "gfdm/geometry.hpp"
#include "gfdm/linalg.hpp"
#include "gfdm/parallel.hpp"
#include "gfdm/problems.hpp"
#include "gfdm/report_io.hpp"
#include "gfdm/rng.hpp"
#include "gfdm/sde.hpp"
#include "gfdm/stars.hpp"
#include "gfdm/stencil.hpp"
#include "gfdm/weights.hpp"
