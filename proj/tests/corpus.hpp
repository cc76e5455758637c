#pragma once

#include <string>
#include <vector>

#include "madil/grid_ops.hpp"
#include "madil/model.hpp"
#include "madil/taskio.hpp"

namespace madil::corpus {

// A curated set of thirty grid-to-grid tasks in the style of the public
// benchmark, spanning background/monocolor decompositions, motifs, objects,
// metagrids and dependent crops. Deterministically generated.
std::vector<Task> curated30();

// A four-example metagrid task with the structure of the running example:
// inputs are a 2x2 metagrid over a background, only the top-left quadrant
// holds a one-color shape; outputs unfold that shape, recolored with the
// separator color, to twice its size.
Task quadrant_unfold_task();

// The hand-encoded solution model for quadrant_unfold_task (the full
// decomposition: background color, metagrid, monocolor shape; output built
// by a two-axis symmetry motif over the recolored mask).
TaskModel quadrant_unfold_model();

}  // namespace madil::corpus
