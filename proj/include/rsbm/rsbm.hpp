#pragma once

#include "rsbm/compose.hpp"
#include "rsbm/discrete.hpp"
#include "rsbm/dsl/emit.hpp"
#include "rsbm/dsl/parser.hpp"
#include "rsbm/dsl/predicates.hpp"
#include "rsbm/engine.hpp"
#include "rsbm/error.hpp"
#include "rsbm/export.hpp"
#include "rsbm/extract.hpp"
#include "rsbm/formula.hpp"
#include "rsbm/iso.hpp"
#include "rsbm/object_graph.hpp"
#include "rsbm/rational.hpp"
#include "rsbm/script.hpp"
#include "rsbm/simplify.hpp"
#include "rsbm/solver.hpp"
#include "rsbm/verify.hpp"
