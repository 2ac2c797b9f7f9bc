#pragma once

#include "gpstlab/arith.hpp"
#include "gpstlab/curve.hpp"
#include "gpstlab/isogeny.hpp"
#include "gpstlab/sidh.hpp"
#include "gpstlab/gpst.hpp"
#include "gpstlab/analysis.hpp"
#include "gpstlab/io.hpp"
