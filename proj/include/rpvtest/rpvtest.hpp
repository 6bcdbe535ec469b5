#pragma once

#include "rpvtest/core.hpp"
#include "rpvtest/diagnostics.hpp"
#include "rpvtest/distributions.hpp"
#include "rpvtest/errors.hpp"
#include "rpvtest/io.hpp"
#include "rpvtest/parametric.hpp"
#include "rpvtest/power.hpp"
#include "rpvtest/random.hpp"
#include "rpvtest/rank_tests.hpp"
#include "rpvtest/report.hpp"
