#pragma once

// Billiards in ideal polyhedra in hyperbolic 3-space: geometry, the bounce
// map, symbolic codes with their grammar, and the unfolding construction
// that turns codes back into trajectories.

#include "h3b/billiard.hpp"
#include "h3b/code.hpp"
#include "h3b/core.hpp"
#include "h3b/geometry.hpp"
#include "h3b/io.hpp"
#include "h3b/linalg.hpp"
#include "h3b/polyhedron.hpp"
#include "h3b/unfold.hpp"
