#pragma once

#include "core.hpp"
#include "random.hpp"
#include "parallel.hpp"
#include "state_chain.hpp"
#include "did_channel.hpp"
#include "info_kernel.hpp"
#include "nnls.hpp"
#include "lower_bound.hpp"
#include "upper_bound.hpp"
#include "low_noise.hpp"
#include "sim_rate.hpp"
#include "verify.hpp"
#include "cli.hpp"
