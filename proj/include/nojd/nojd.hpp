#pragma once

#include "nojd/bench.hpp"
#include "nojd/cjdi.hpp"
#include "nojd/embedding.hpp"
#include "nojd/io.hpp"
#include "nojd/jdi.hpp"
#include "nojd/metrics.hpp"
#include "nojd/problemgen.hpp"
#include "nojd/report.hpp"
#include "nojd/rng.hpp"
#include "nojd/rotations.hpp"
