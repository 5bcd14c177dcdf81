#pragma once
// Umbrella header.

#include "ncmart/config.hpp"
#include "ncmart/algebra.hpp"
#include "ncmart/rearrangement.hpp"
#include "ncmart/symspaces.hpp"
#include "ncmart/martingale.hpp"
#include "ncmart/cuculescu.hpp"
#include "ncmart/jones.hpp"
#include "ncmart/random.hpp"
#include "ncmart/parallel.hpp"
#include "ncmart/verify.hpp"
#include "ncmart/io.hpp"
