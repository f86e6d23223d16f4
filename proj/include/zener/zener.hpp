#pragma once

#include "zener/assembly.hpp"
#include "zener/basis.hpp"
#include "zener/bdm.hpp"
#include "zener/cg_solver.hpp"
#include "zener/common.hpp"
#include "zener/condensation.hpp"
#include "zener/convergence.hpp"
#include "zener/dg_solver.hpp"
#include "zener/discretization.hpp"
#include "zener/fields.hpp"
#include "zener/manufactured.hpp"
#include "zener/materials.hpp"
#include "zener/mesh.hpp"
#include "zener/norms.hpp"
#include "zener/parallel.hpp"
#include "zener/projector.hpp"
#include "zener/quadrature.hpp"
#include "zener/scheme.hpp"
#include "zener/taylor.hpp"
