#pragma once

#include "bbcg/baselines.hpp"
#include "bbcg/block_bandit.hpp"
#include "bbcg/cg_solver.hpp"
#include "bbcg/core.hpp"
#include "bbcg/geometry.hpp"
#include "bbcg/harness.hpp"
#include "bbcg/losses.hpp"
#include "bbcg/sampling.hpp"
#include "bbcg/smoothing.hpp"
