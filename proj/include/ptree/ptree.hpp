#pragma once

/// \file ptree.hpp
/// \brief Umbrella header for the probability-tree library.

#include "ptree/cut.hpp"
#include "ptree/errors.hpp"
#include "ptree/event.hpp"
#include "ptree/io.hpp"
#include "ptree/mincut.hpp"
#include "ptree/prob.hpp"
#include "ptree/query.hpp"
#include "ptree/transforms.hpp"
#include "ptree/tree.hpp"
