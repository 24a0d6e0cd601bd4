#pragma once

#include "pentatrope/automaton.hpp"
#include "pentatrope/errors.hpp"
#include "pentatrope/exact_rank.hpp"
#include "pentatrope/experiments.hpp"
#include "pentatrope/invariants.hpp"
#include "pentatrope/io.hpp"
#include "pentatrope/pentagram_dynamics.hpp"
#include "pentatrope/projective_geometry.hpp"
#include "pentatrope/sampling.hpp"
#include "pentatrope/tropical_core.hpp"
