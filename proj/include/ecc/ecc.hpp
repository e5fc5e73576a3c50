#pragma once

#include "ecc/hypergraph.hpp"
#include "ecc/lp.hpp"
#include "ecc/relaxations.hpp"
#include "ecc/rounding.hpp"
#include "ecc/combinatorial.hpp"
#include "ecc/probability.hpp"
#include "ecc/report.hpp"
#include "ecc/cli.hpp"
