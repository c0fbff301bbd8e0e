#pragma once

#include "anyonkit/braid.hpp"
#include "anyonkit/coherence.hpp"
#include "anyonkit/fusion_ring.hpp"
#include "anyonkit/fusion_space.hpp"
#include "anyonkit/model_io.hpp"
#include "anyonkit/solver.hpp"
