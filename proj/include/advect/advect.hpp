#pragma once

#include "advect/advection.hpp"
#include "advect/cooccurrence.hpp"
#include "advect/corpus.hpp"
#include "advect/corpus_io.hpp"
#include "advect/counts.hpp"
#include "advect/csv.hpp"
#include "advect/error.hpp"
#include "advect/lda.hpp"
#include "advect/random.hpp"
#include "advect/stats.hpp"
#include "advect/synth.hpp"
#include "advect/timeseries.hpp"
