#pragma once

#include "chordal.hpp"
#include "coefficients.hpp"
#include "driving.hpp"
#include "driving_spec.hpp"
#include "errors.hpp"
#include "field_expr.hpp"
#include "generators.hpp"
#include "geometry.hpp"
#include "jet.hpp"
#include "ode.hpp"
#include "quadrature.hpp"
#include "radial.hpp"
#include "range.hpp"
#include "trace_io.hpp"
