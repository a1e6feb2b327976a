#pragma once

#include "uac/automorphism.hpp"
#include "uac/builders.hpp"
#include "uac/couplings.hpp"
#include "uac/forbidden.hpp"
#include "uac/graph.hpp"
#include "uac/kernel.hpp"
#include "uac/maxflow.hpp"
#include "uac/rational.hpp"
#include "uac/simulation.hpp"
#include "uac/verifier.hpp"
