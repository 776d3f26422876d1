#pragma once

#include "ftrend/arma_fit.hpp"
#include "ftrend/arma_model.hpp"
#include "ftrend/bootstrap.hpp"
#include "ftrend/calibration.hpp"
#include "ftrend/error.hpp"
#include "ftrend/innovations.hpp"
#include "ftrend/io.hpp"
#include "ftrend/lag.hpp"
#include "ftrend/learning.hpp"
#include "ftrend/series.hpp"
#include "ftrend/simulate.hpp"
#include "ftrend/spectrum.hpp"
#include "ftrend/stats.hpp"
#include "ftrend/trend.hpp"
#include "ftrend/trend_tests.hpp"
#include "ftrend/version.hpp"
