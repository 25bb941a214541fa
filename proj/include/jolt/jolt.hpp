#pragma once

#include "jolt/errors.hpp"
#include "jolt/rng.hpp"
#include "jolt/geometry.hpp"
#include "jolt/tsplib.hpp"
#include "jolt/scenario.hpp"
#include "jolt/channel.hpp"
#include "jolt/energy.hpp"
#include "jolt/awoa.hpp"
#include "jolt/ersom.hpp"
#include "jolt/framework.hpp"
#include "jolt/io.hpp"
#include "jolt/bench.hpp"
