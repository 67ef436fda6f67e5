#pragma once

#include "urbanbench/road/mrf.hpp"
#include "urbanbench/road/network.hpp"
#include "urbanbench/road/polygonize.hpp"
#include "urbanbench/road/surface.hpp"
