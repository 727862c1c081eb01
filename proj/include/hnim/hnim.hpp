#pragma once

#include "hnim/analysis.hpp"
#include "hnim/channel.hpp"
#include "hnim/codebook.hpp"
#include "hnim/detectors.hpp"
#include "hnim/error.hpp"
#include "hnim/harness.hpp"
#include "hnim/modem.hpp"
#include "hnim/rng.hpp"
