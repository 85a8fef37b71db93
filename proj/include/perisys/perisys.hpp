#pragma once

#include "perisys/bounds.hpp"
#include "perisys/config.hpp"
#include "perisys/eigenpair.hpp"
#include "perisys/error.hpp"
#include "perisys/evolution.hpp"
#include "perisys/grid.hpp"
#include "perisys/linalg.hpp"
#include "perisys/nonlocal.hpp"
#include "perisys/periodic.hpp"
#include "perisys/pipeline.hpp"
#include "perisys/problem.hpp"
#include "perisys/report.hpp"
#include "perisys/verify.hpp"
