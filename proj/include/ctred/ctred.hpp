#pragma once

#include "certify.hpp"
#include "decompose.hpp"
#include "error.hpp"
#include "lti.hpp"
#include "matrix_kernels.hpp"
#include "norms.hpp"
#include "polezero.hpp"
#include "polynomial.hpp"
#include "realization.hpp"
#include "reduce.hpp"
