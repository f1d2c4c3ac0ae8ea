#pragma once

#include "rho/baselines.hpp"
#include "rho/catalog.hpp"
#include "rho/dataset.hpp"
#include "rho/density.hpp"
#include "rho/discrete.hpp"
#include "rho/evaluators.hpp"
#include "rho/hellinger.hpp"
#include "rho/model_space.hpp"
#include "rho/numeric.hpp"
#include "rho/psi.hpp"
#include "rho/psi_inequalities.hpp"
#include "rho/quadrature.hpp"
#include "rho/rho_engine.hpp"
#include "rho/sampling.hpp"
