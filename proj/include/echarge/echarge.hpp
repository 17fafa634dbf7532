#pragma once

#include "echarge/error.hpp"
#include "echarge/qstate.hpp"
#include "echarge/charge.hpp"
#include "echarge/bisection.hpp"
#include "echarge/thermal_xyz.hpp"
#include "echarge/heisenberg_ring.hpp"
