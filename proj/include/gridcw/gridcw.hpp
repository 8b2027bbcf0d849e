#pragma once

#include "builders.hpp"
#include "catalog.hpp"
#include "classify.hpp"
#include "cwx.hpp"
#include "delta_spec.hpp"
#include "errors.hpp"
#include "grid.hpp"
#include "lower_bound.hpp"
#include "neighbourhood.hpp"
#include "oracle.hpp"
#include "veins_panels.hpp"
