#ifndef HETNET_HETNET_HPP
#define HETNET_HETNET_HPP

#include "hetnet/common.hpp"
#include "hetnet/netmodel.hpp"
#include "hetnet/scenario_io.hpp"
#include "hetnet/assignment.hpp"
#include "hetnet/ecav.hpp"
#include "hetnet/mcsolver.hpp"
#include "hetnet/baselines.hpp"
#include "hetnet/harness.hpp"

#endif
