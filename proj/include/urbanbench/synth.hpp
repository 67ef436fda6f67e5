#pragma once

#include "urbanbench/synth/city.hpp"
#include "urbanbench/synth/fixture.hpp"
#include "urbanbench/synth/render.hpp"
