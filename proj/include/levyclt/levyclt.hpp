#pragma once

#include "levyclt/errors.hpp"
#include "levyclt/integrate.hpp"
#include "levyclt/normal.hpp"
#include "levyclt/measure.hpp"
#include "levyclt/levy_model.hpp"
#include "levyclt/quadrature.hpp"
#include "levyclt/distance.hpp"
#include "levyclt/sampler.hpp"
#include "levyclt/bounds.hpp"
#include "levyclt/verify.hpp"
