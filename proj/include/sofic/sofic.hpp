#pragma once

// Umbrella header: Gibbs measures on sofic subshifts through nested
// finite-type approximations, transfer matrices and certified Perron data.

#include "sofic/bracket.hpp"
#include "sofic/constants.hpp"
#include "sofic/errors.hpp"
#include "sofic/gibbs.hpp"
#include "sofic/io.hpp"
#include "sofic/measure.hpp"
#include "sofic/potential.hpp"
#include "sofic/presentation.hpp"
#include "sofic/sft.hpp"
#include "sofic/transfer.hpp"
#include "sofic/word.hpp"
