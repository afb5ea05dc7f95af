#pragma once

#include "primerace/characters.hpp"
#include "primerace/config.hpp"
#include "primerace/density.hpp"
#include "primerace/lseries.hpp"
#include "primerace/ntheory.hpp"
#include "primerace/race.hpp"
#include "primerace/rng.hpp"
#include "primerace/sieve.hpp"
#include "primerace/simplex.hpp"
#include "primerace/spectral.hpp"
