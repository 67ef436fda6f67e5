#pragma once

#include "urbanbench/extract/components.hpp"
#include "urbanbench/extract/contours.hpp"
#include "urbanbench/extract/morph.hpp"
#include "urbanbench/extract/skeleton.hpp"
