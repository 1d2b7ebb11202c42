#pragma once

#include "stmod/types.hpp"
#include "stmod/multigraph.hpp"
#include "stmod/tree_oracle.hpp"
#include "stmod/dual_qp.hpp"
#include "stmod/modulus.hpp"
#include "stmod/meo_analysis.hpp"
#include "stmod/partitions.hpp"
#include "stmod/deflation.hpp"
#include "stmod/brute_oracle.hpp"
