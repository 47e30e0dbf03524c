#pragma once

#include "ratebound/error.hpp"
#include "ratebound/numerics.hpp"
#include "ratebound/rating_core.hpp"
#include "ratebound/error_rate.hpp"
#include "ratebound/calibration.hpp"
#include "ratebound/monitoring.hpp"
#include "ratebound/io.hpp"
#include "ratebound/repro.hpp"
