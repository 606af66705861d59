#pragma once

#include "augment.hpp"
#include "bundle.hpp"
#include "cli.hpp"
#include "corpus.hpp"
#include "metrics.hpp"
#include "model.hpp"
#include "pipeline.hpp"
#include "runs.hpp"
#include "search.hpp"
#include "synthetic.hpp"
#include "train.hpp"
