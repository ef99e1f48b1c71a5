#pragma once

#include "dirot/antitone.hpp"
#include "dirot/availability_pool.hpp"
#include "dirot/cdf_formula.hpp"
#include "dirot/constraints.hpp"
#include "dirot/coupling.hpp"
#include "dirot/errors.hpp"
#include "dirot/greedy.hpp"
#include "dirot/io.hpp"
#include "dirot/lp.hpp"
#include "dirot/measures.hpp"
#include "dirot/mixed_measure.hpp"
#include "dirot/monotone_map.hpp"
#include "dirot/oracle.hpp"
#include "dirot/rational.hpp"
#include "dirot/shadow.hpp"
#include "dirot/transport_map.hpp"
#include "dirot/variance.hpp"
#include "dirot/verify.hpp"
