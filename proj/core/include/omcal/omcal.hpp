#pragma once

#include "omcal/anchors.hpp"
#include "omcal/dataset.hpp"
#include "omcal/error.hpp"
#include "omcal/graph_tools.hpp"
#include "omcal/metrics.hpp"
#include "omcal/single_view.hpp"
#include "omcal/solver.hpp"
