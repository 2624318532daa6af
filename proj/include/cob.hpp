#pragma once

// Umbrella header: pulls in the full library.

#include "cob/rational.hpp"
#include "cob/matrix.hpp"
#include "cob/vartable.hpp"
#include "cob/monomial.hpp"
#include "cob/polynomial.hpp"
#include "cob/interval.hpp"
#include "cob/model.hpp"
#include "cob/parse.hpp"
#include "cob/render.hpp"
#include "cob/subspace.hpp"
#include "cob/closure.hpp"
#include "cob/abstraction.hpp"
#include "cob/affine.hpp"
#include "cob/invariants.hpp"
#include "cob/validate.hpp"
#include "cob/pipeline.hpp"
#include "cob/report.hpp"
