#pragma once

#include "coarea/config.hpp"
#include "coarea/error.hpp"
#include "coarea/io.hpp"
#include "coarea/kernel.hpp"
#include "coarea/numerics.hpp"
#include "coarea/phase.hpp"
#include "coarea/pushforward.hpp"
#include "coarea/qmc.hpp"
#include "coarea/recomposition.hpp"
#include "coarea/reduction.hpp"
#include "coarea/sparse.hpp"
