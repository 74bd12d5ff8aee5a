// bathkit.hpp - Umbrella header

#pragma once

#include "bathkit/csv.hpp"
#include "bathkit/discretize.hpp"
#include "bathkit/dynamics.hpp"
#include "bathkit/error.hpp"
#include "bathkit/hamiltonian.hpp"
#include "bathkit/lowrank.hpp"
#include "bathkit/serialize.hpp"
#include "bathkit/specdens.hpp"
#include "bathkit/units.hpp"
