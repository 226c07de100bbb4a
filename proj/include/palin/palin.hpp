#pragma once

#include "palin/errors.hpp"
#include "palin/numerics.hpp"
#include "palin/polynomial.hpp"
#include "palin/backward_error.hpp"
#include "palin/dilation.hpp"
#include "palin/perturbations.hpp"
#include "palin/oracle.hpp"
#include "palin/linearization.hpp"
#include "palin/io.hpp"
#include "palin/verify.hpp"
