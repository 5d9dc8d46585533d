#pragma once

#include "seqvpr/analysis.hpp"
#include "seqvpr/bench.hpp"
#include "seqvpr/csv.hpp"
#include "seqvpr/descriptor.hpp"
#include "seqvpr/errors.hpp"
#include "seqvpr/frame.hpp"
#include "seqvpr/matcher.hpp"
#include "seqvpr/pgm.hpp"
#include "seqvpr/sequence_store.hpp"
