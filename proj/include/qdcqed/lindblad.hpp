#pragma once

#include "qdcqed/lindblad/decay_fit.hpp"
#include "qdcqed/lindblad/dormand_prince.hpp"
#include "qdcqed/lindblad/evolve.hpp"
#include "qdcqed/lindblad/hilbert.hpp"
#include "qdcqed/lindblad/liouvillian.hpp"
#include "qdcqed/lindblad/operators.hpp"
#include "qdcqed/lindblad/steady_state.hpp"
