#pragma once

// Attack countermeasure trees: parsing, static and time-bounded analysis.

#include "actree/compose.hpp"
#include "actree/ctmc.hpp"
#include "actree/curve.hpp"
#include "actree/error.hpp"
#include "actree/imc.hpp"
#include "actree/model.hpp"
#include "actree/parser.hpp"
#include "actree/ranking.hpp"
#include "actree/rng.hpp"
#include "actree/scenario.hpp"
#include "actree/serialize.hpp"
#include "actree/simulate.hpp"
#include "actree/static_analysis.hpp"
#include "actree/timing.hpp"
#include "actree/transient.hpp"
