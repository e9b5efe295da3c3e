#pragma once

#include "bfl/analysis.hpp"
#include "bfl/bdd.hpp"
#include "bfl/compiler.hpp"
#include "bfl/dot.hpp"
#include "bfl/error.hpp"
#include "bfl/fault_tree.hpp"
#include "bfl/formula.hpp"
#include "bfl/oracle.hpp"
#include "bfl/scope_mode.hpp"
#include "bfl/version.hpp"
