#pragma once

#include "errors.hpp"
#include "tolerances.hpp"
#include "random.hpp"
#include "special_functions.hpp"
#include "quadrature.hpp"
#include "linalg.hpp"
#include "pd_group.hpp"
#include "gelfand_core.hpp"
#include "homogeneous_space.hpp"
#include "verification.hpp"
#include "simulation.hpp"
#include "io.hpp"
