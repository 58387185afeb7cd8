#pragma once

// Everything but the CLI helpers.
#include "rigidflow/geometry/body.hpp"
#include "rigidflow/geometry/fields.hpp"
#include "rigidflow/geometry/quadrature.hpp"
#include "rigidflow/kirchhoff/added_mass.hpp"
#include "rigidflow/kirchhoff/potentials.hpp"
#include "rigidflow/kirchhoff/test_fields.hpp"
#include "rigidflow/forms/forms.hpp"
#include "rigidflow/forms/monitors.hpp"
#include "rigidflow/viscous/setup.hpp"
#include "rigidflow/viscous/solver.hpp"
#include "rigidflow/euler/energy.hpp"
#include "rigidflow/euler/solver.hpp"
#include "rigidflow/motion/motion.hpp"
#include "rigidflow/studies/inertia.hpp"
#include "rigidflow/studies/inviscid.hpp"
