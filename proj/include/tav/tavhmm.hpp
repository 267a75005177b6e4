#pragma once

// Umbrella header for the whole decoding toolkit.

#include "tav/bench.hpp"
#include "tav/cfdp.hpp"
#include "tav/common.hpp"
#include "tav/exploration.hpp"
#include "tav/generators.hpp"
#include "tav/hierarchy.hpp"
#include "tav/io.hpp"
#include "tav/model.hpp"
#include "tav/rng.hpp"
#include "tav/scores.hpp"
#include "tav/spectral.hpp"
#include "tav/tav.hpp"
#include "tav/trellis.hpp"
#include "tav/viterbi.hpp"
