#pragma once

#include "bvq/quantum/ansatz.hpp"
#include "bvq/quantum/circuit.hpp"
#include "bvq/quantum/hadamard_test.hpp"
#include "bvq/quantum/sampling.hpp"
#include "bvq/quantum/state_prep.hpp"
#include "bvq/quantum/statevector.hpp"
