#pragma once

#include "dwell/asymptotic.hpp"
#include "dwell/f_iter.hpp"
#include "dwell/grid.hpp"
#include "dwell/json_io.hpp"
#include "dwell/model.hpp"
#include "dwell/oracle.hpp"
#include "dwell/quad.hpp"
#include "dwell/tables.hpp"
#include "dwell/tau_iter.hpp"
