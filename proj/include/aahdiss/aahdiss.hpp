#pragma once

#include "aahdiss/bath.hpp"
#include "aahdiss/config.hpp"
#include "aahdiss/core.hpp"
#include "aahdiss/heom.hpp"
#include "aahdiss/lattice.hpp"
#include "aahdiss/markovian.hpp"
#include "aahdiss/observables.hpp"
#include "aahdiss/runner.hpp"
#include "aahdiss/semiclassical.hpp"
#include "aahdiss/spectrum.hpp"
