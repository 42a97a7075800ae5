#pragma once

#include "confound/ci_engine.hpp"
#include "confound/classifier.hpp"
#include "confound/dataset.hpp"
#include "confound/error.hpp"
#include "confound/metrics.hpp"
#include "confound/monotonicity.hpp"
#include "confound/parallel.hpp"
#include "confound/permutation.hpp"
#include "confound/report.hpp"
#include "confound/rng.hpp"
#include "confound/sampler.hpp"
#include "confound/simgen.hpp"
