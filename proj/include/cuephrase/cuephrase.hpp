#pragma once

#include "cuephrase/baselines.hpp"
#include "cuephrase/corpus_io.hpp"
#include "cuephrase/dataset.hpp"
#include "cuephrase/dtree.hpp"
#include "cuephrase/error.hpp"
#include "cuephrase/eval.hpp"
#include "cuephrase/example.hpp"
#include "cuephrase/experiment.hpp"
#include "cuephrase/feature_set.hpp"
#include "cuephrase/model_io.hpp"
#include "cuephrase/rng.hpp"
#include "cuephrase/rules.hpp"
#include "cuephrase/schema.hpp"
#include "cuephrase/synthetic.hpp"
