// Umbrella header.
#pragma once

#include "symlab/symbol.hpp"
#include "symlab/spectral.hpp"
#include "symlab/equation.hpp"
#include "symlab/catalog.hpp"
#include "symlab/classifier.hpp"
#include "symlab/solver.hpp"
#include "symlab/symmetry.hpp"
#include "symlab/experiment.hpp"
