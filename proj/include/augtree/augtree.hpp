#pragma once

#include "augtree/boundary.hpp"
#include "augtree/classify.hpp"
#include "augtree/errors.hpp"
#include "augtree/geometry.hpp"
#include "augtree/ifs_model.hpp"
#include "augtree/incidence.hpp"
#include "augtree/isomorphism.hpp"
#include "augtree/linalg.hpp"
#include "augtree/rearrange.hpp"
#include "augtree/report.hpp"
#include "augtree/sigma.hpp"
#include "augtree/svg.hpp"
#include "augtree/tree_metric.hpp"
#include "augtree/union_find.hpp"
