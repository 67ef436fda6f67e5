#pragma once

#include "urbanbench/metrics/contour.hpp"
#include "urbanbench/metrics/height.hpp"
#include "urbanbench/metrics/instance.hpp"
#include "urbanbench/metrics/semantic.hpp"
#include "urbanbench/metrics/topology.hpp"
