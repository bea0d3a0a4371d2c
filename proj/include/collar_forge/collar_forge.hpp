#pragma once

#include "collar_forge/bicollar.hpp"
#include "collar_forge/collar.hpp"
#include "collar_forge/cover.hpp"
#include "collar_forge/error.hpp"
#include "collar_forge/fixtures.hpp"
#include "collar_forge/io.hpp"
#include "collar_forge/lipschitz.hpp"
#include "collar_forge/metric.hpp"
#include "collar_forge/parallel.hpp"
#include "collar_forge/point.hpp"
#include "collar_forge/region.hpp"
#include "collar_forge/restrict.hpp"
#include "collar_forge/sampling.hpp"
#include "collar_forge/verify.hpp"
