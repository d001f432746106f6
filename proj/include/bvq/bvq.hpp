#pragma once

#include "bvq/bayes_opt.hpp"
#include "bvq/config.hpp"
#include "bvq/design_objective.hpp"
#include "bvq/error_bounds.hpp"
#include "bvq/experiment.hpp"
#include "bvq/pauli_lcu.hpp"
#include "bvq/pde_model.hpp"
#include "bvq/quantum_kernel.hpp"
#include "bvq/vqls.hpp"
