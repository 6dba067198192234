#pragma once

#include "shallowlab/config.hpp"
#include "shallowlab/crf.hpp"
#include "shallowlab/error.hpp"
#include "shallowlab/evaluation.hpp"
#include "shallowlab/experiment.hpp"
#include "shallowlab/features.hpp"
#include "shallowlab/lbfgs.hpp"
#include "shallowlab/model.hpp"
#include "shallowlab/model_io.hpp"
#include "shallowlab/pipeline.hpp"
#include "shallowlab/report.hpp"
#include "shallowlab/ssf.hpp"
#include "shallowlab/synthetic.hpp"
#include "shallowlab/tagset.hpp"
#include "shallowlab/tokenizer.hpp"
#include "shallowlab/trainer.hpp"
#include "shallowlab/unicode.hpp"
