#pragma once

// Umbrella header: the whole library apart from the CLI front end.

#include "secstore/analysis.hpp"
#include "secstore/classify.hpp"
#include "secstore/code.hpp"
#include "secstore/errors.hpp"
#include "secstore/field.hpp"
#include "secstore/graph.hpp"
#include "secstore/verify.hpp"
