#pragma once

#include "bscat/core.hpp"
#include "bscat/potential.hpp"
#include "bscat/specfun.hpp"
#include "bscat/field.hpp"
#include "bscat/resolvent.hpp"
#include "bscat/born.hpp"
#include "bscat/planewave.hpp"
#include "bscat/dyson.hpp"
#include "bscat/io.hpp"
#include "bscat/experiments.hpp"
