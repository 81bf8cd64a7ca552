// Umbrella header.
#pragma once

#include "cloudopt/baselines.hpp"
#include "cloudopt/cg.hpp"
#include "cloudopt/chaos.hpp"
#include "cloudopt/cloud.hpp"
#include "cloudopt/config.hpp"
#include "cloudopt/gradcheck.hpp"
#include "cloudopt/io.hpp"
#include "cloudopt/plant.hpp"
#include "cloudopt/problem.hpp"
#include "cloudopt/report.hpp"
#include "cloudopt/rng.hpp"
