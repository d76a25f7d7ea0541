#pragma once

#include "permitmc/errors.hpp"
#include "permitmc/state_set.hpp"
#include "permitmc/model.hpp"
#include "permitmc/formula.hpp"
#include "permitmc/checker.hpp"
#include "permitmc/deduction.hpp"
#include "permitmc/algebra.hpp"
#include "permitmc/atl.hpp"
#include "permitmc/generators.hpp"
#include "permitmc/fixtures.hpp"
#include "permitmc/json_io.hpp"
