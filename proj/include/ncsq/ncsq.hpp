#pragma once

#include "ncsq/analytic.hpp"
#include "ncsq/error.hpp"
#include "ncsq/fock/expm.hpp"
#include "ncsq/fock/operators.hpp"
#include "ncsq/fock/space.hpp"
#include "ncsq/fock/state.hpp"
#include "ncsq/nc_params.hpp"
#include "ncsq/verifier.hpp"
