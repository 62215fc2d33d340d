#pragma once

// Umbrella header: BGLS norms, fundamental functions, and Poincare-type
// inequality verification over finite metric measure spaces.

#include "grandpoincare/config.hpp"
#include "grandpoincare/errors.hpp"
#include "grandpoincare/extremum.hpp"
#include "grandpoincare/field.hpp"
#include "grandpoincare/gls.hpp"
#include "grandpoincare/numeric.hpp"
#include "grandpoincare/poincare.hpp"
#include "grandpoincare/psi.hpp"
#include "grandpoincare/report.hpp"
#include "grandpoincare/runner.hpp"
#include "grandpoincare/search.hpp"
#include "grandpoincare/space.hpp"
#include "grandpoincare/transfer.hpp"
