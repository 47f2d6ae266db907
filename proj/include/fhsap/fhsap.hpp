// Umbrella header for the FHSAP solver library.

#ifndef FHSAP_FHSAP_HPP
#define FHSAP_FHSAP_HPP

#include "fhsap/conic.hpp"
#include "fhsap/exact.hpp"
#include "fhsap/formulations.hpp"
#include "fhsap/instance.hpp"
#include "fhsap/matrix.hpp"
#include "fhsap/model.hpp"
#include "fhsap/report.hpp"
#include "fhsap/rng.hpp"
#include "fhsap/robust.hpp"
#include "fhsap/rounding.hpp"

#endif  // FHSAP_FHSAP_HPP
