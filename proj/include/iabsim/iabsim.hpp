#pragma once

#include "iabsim/units.hpp"
#include "iabsim/channel_model.hpp"
#include "iabsim/topology.hpp"
#include "iabsim/channel_realization.hpp"
#include "iabsim/matching.hpp"
#include "iabsim/revised_simplex.hpp"
#include "iabsim/schedule_optimizer.hpp"
#include "iabsim/reference_oracle.hpp"
#include "iabsim/oracle_check.hpp"
#include "iabsim/experiment.hpp"
#include "iabsim/config.hpp"
#include "iabsim/serialization.hpp"
