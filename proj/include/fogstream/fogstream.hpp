#pragma once
// Umbrella header.

#include "fogstream/app.hpp"
#include "fogstream/config.hpp"
#include "fogstream/engine.hpp"
#include "fogstream/kernel.hpp"
#include "fogstream/metrics.hpp"
#include "fogstream/placement.hpp"
#include "fogstream/random.hpp"
#include "fogstream/reports.hpp"
#include "fogstream/runner.hpp"
#include "fogstream/topology.hpp"
#include "fogstream/types.hpp"
#include "fogstream/workload.hpp"
