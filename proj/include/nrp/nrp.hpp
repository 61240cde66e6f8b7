#ifndef NRP_NRP_HPP_
#define NRP_NRP_HPP_

// Umbrella header for the whole toolkit.

#include "nrp/core.hpp"
#include "nrp/eda.hpp"
#include "nrp/errors.hpp"
#include "nrp/exact.hpp"
#include "nrp/experiment.hpp"
#include "nrp/generator.hpp"
#include "nrp/instance_io.hpp"
#include "nrp/interaction_graph.hpp"
#include "nrp/metrics.hpp"
#include "nrp/rng.hpp"

#endif  // NRP_NRP_HPP_
