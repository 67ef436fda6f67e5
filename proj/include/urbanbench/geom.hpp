#pragma once

#include "urbanbench/geom/discretize.hpp"
#include "urbanbench/geom/rasterize.hpp"
#include "urbanbench/geom/rdp.hpp"
#include "urbanbench/geom/turning.hpp"
#include "urbanbench/geom/types.hpp"
