#pragma once

#include "tgraph/batch.hpp"
#include "tgraph/builtin_hooks.hpp"
#include "tgraph/discretize.hpp"
#include "tgraph/error.hpp"
#include "tgraph/eval.hpp"
#include "tgraph/granularity.hpp"
#include "tgraph/graph.hpp"
#include "tgraph/hooks.hpp"
#include "tgraph/io.hpp"
#include "tgraph/loader.hpp"
#include "tgraph/sampling.hpp"
#include "tgraph/synthetic.hpp"
#include "tgraph/version.hpp"
#include "tgraph/view.hpp"
