#pragma once

#include "lnsforge/bnb.hpp"
#include "lnsforge/dense.hpp"
#include "lnsforge/diving.hpp"
#include "lnsforge/errors.hpp"
#include "lnsforge/expert.hpp"
#include "lnsforge/generators.hpp"
#include "lnsforge/graph.hpp"
#include "lnsforge/io.hpp"
#include "lnsforge/lns.hpp"
#include "lnsforge/lp.hpp"
#include "lnsforge/metrics.hpp"
#include "lnsforge/mip.hpp"
#include "lnsforge/nn.hpp"
#include "lnsforge/primal_gap.hpp"
#include "lnsforge/rng.hpp"
#include "lnsforge/svg.hpp"
#include "lnsforge/util.hpp"
#include "lnsforge/version.hpp"
