#pragma once

#include "gsis/core.hpp"
#include "gsis/graph.hpp"
#include "gsis/spectral.hpp"
#include "gsis/krylov.hpp"
#include "gsis/spaces.hpp"
#include "gsis/kernels.hpp"
#include "gsis/sampling.hpp"
#include "gsis/experiments.hpp"
#include "gsis/io.hpp"
