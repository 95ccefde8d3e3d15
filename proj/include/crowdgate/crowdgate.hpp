#pragma once

// Convenience umbrella: the whole library in one include.

#include "crowdgate/core.hpp"
#include "crowdgate/errors.hpp"
#include "crowdgate/experiments.hpp"
#include "crowdgate/online.hpp"
#include "crowdgate/prediction.hpp"
#include "crowdgate/rng.hpp"
#include "crowdgate/sampling.hpp"
#include "crowdgate/serde.hpp"
#include "crowdgate/simulator.hpp"
#include "crowdgate/verification.hpp"
