#pragma once

#include "model_params.hpp"
#include "coxeter.hpp"
#include "grid.hpp"
#include "fft.hpp"
#include "spectral.hpp"
#include "energy.hpp"
#include "symmetry.hpp"
#include "analysis.hpp"
#include "solver.hpp"
#include "energy_table.hpp"
#include "extension.hpp"
#include "io.hpp"
