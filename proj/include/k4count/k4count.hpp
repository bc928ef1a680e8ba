#pragma once

#include "k4count/auxgraph.hpp"
#include "k4count/binomial.hpp"
#include "k4count/bitset.hpp"
#include "k4count/counting.hpp"
#include "k4count/error.hpp"
#include "k4count/experiments/config.hpp"
#include "k4count/experiments/report.hpp"
#include "k4count/experiments/runner.hpp"
#include "k4count/graph_io.hpp"
#include "k4count/model.hpp"
#include "k4count/rational.hpp"
#include "k4count/regularity.hpp"
#include "k4count/rng.hpp"
#include "k4count/sampling.hpp"
#include "k4count/version.hpp"
