#pragma once

#include "gaitd/distribution.hpp"
#include "gaitd/errors.hpp"
#include "gaitd/fit.hpp"
#include "gaitd/gte.hpp"
#include "gaitd/links.hpp"
#include "gaitd/measures.hpp"
#include "gaitd/model.hpp"
#include "gaitd/parents.hpp"
#include "gaitd/special_sets.hpp"
