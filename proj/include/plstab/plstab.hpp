#pragma once

#include "plstab/errors.hpp"
#include "plstab/grid_function.hpp"
#include "plstab/concavity.hpp"
#include "plstab/transport.hpp"
#include "plstab/supconvolution.hpp"
#include "plstab/deficit.hpp"
#include "plstab/levelsets.hpp"
#include "plstab/logconcave.hpp"
#include "plstab/radial.hpp"
#include "plstab/random_logconcave.hpp"
#include "plstab/stability.hpp"
#include "plstab/invariants.hpp"
#include "plstab/experiment.hpp"
