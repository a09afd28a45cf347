#pragma once

#include "cgp/decode.hpp"
#include "cgp/evolution.hpp"
#include "cgp/execute.hpp"
#include "cgp/function_set.hpp"
#include "cgp/genotype.hpp"
#include "cgp/harness.hpp"
#include "cgp/mutation.hpp"
#include "cgp/problems.hpp"
#include "cgp/random.hpp"
#include "cgp/stats.hpp"
