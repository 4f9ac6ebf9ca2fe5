#pragma once

#include "friable/error.hpp"
#include "friable/exact.hpp"
#include "friable/parallel.hpp"
#include "friable/numeric.hpp"
#include "friable/census.hpp"
#include "friable/counts.hpp"
#include "friable/dickman.hpp"
#include "friable/saddle.hpp"
#include "friable/lab.hpp"
#include "friable/chart.hpp"
