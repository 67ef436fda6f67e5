#pragma once

#include "urbanbench/align/coarse.hpp"
#include "urbanbench/align/edges.hpp"
#include "urbanbench/align/fine.hpp"
#include "urbanbench/align/ncc.hpp"
#include "urbanbench/align/panorama.hpp"
#include "urbanbench/align/pipeline.hpp"
#include "urbanbench/align/rectify.hpp"
