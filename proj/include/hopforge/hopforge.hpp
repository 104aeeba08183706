#pragma once

// Umbrella header for the whole retrieval engine.

#include "hopforge/bytes.hpp"
#include "hopforge/corpus.hpp"
#include "hopforge/dense_index.hpp"
#include "hopforge/encoders.hpp"
#include "hopforge/evaluation.hpp"
#include "hopforge/multihop.hpp"
#include "hopforge/parallel.hpp"
#include "hopforge/paths.hpp"
#include "hopforge/rng.hpp"
#include "hopforge/sparse_index.hpp"
#include "hopforge/synthbench.hpp"
#include "hopforge/text.hpp"
#include "hopforge/training.hpp"
#include "hopforge/weak_supervision.hpp"
