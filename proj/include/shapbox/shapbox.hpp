#pragma once

// Exact SHAP attributions for binary classifiers under product
// distributions, their multilinear polynomial form over an uncertainty
// hyperrectangle, region decision queries, hardness gadget generators, and
// the end-to-end housing study.  Everything computes in exact rational
// arithmetic; nothing here is approximate unless a function says so.

#include "shapbox/dataset.hpp"
#include "shapbox/distribution.hpp"
#include "shapbox/error.hpp"
#include "shapbox/feature_space.hpp"
#include "shapbox/hardness.hpp"
#include "shapbox/hyperrectangle.hpp"
#include "shapbox/io.hpp"
#include "shapbox/model.hpp"
#include "shapbox/parallel.hpp"
#include "shapbox/pipeline.hpp"
#include "shapbox/polynomial.hpp"
#include "shapbox/random.hpp"
#include "shapbox/rational.hpp"
#include "shapbox/region.hpp"
#include "shapbox/shap.hpp"
#include "shapbox/sqrt_approx.hpp"
#include "shapbox/train.hpp"
