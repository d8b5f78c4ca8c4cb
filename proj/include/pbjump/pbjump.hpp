#pragma once

#include "pbjump/analysis.hpp"
#include "pbjump/bench.hpp"
#include "pbjump/constraint.hpp"
#include "pbjump/extended.hpp"
#include "pbjump/literal.hpp"
#include "pbjump/opb.hpp"
#include "pbjump/propagation.hpp"
#include "pbjump/solver.hpp"
#include "pbjump/trail.hpp"
