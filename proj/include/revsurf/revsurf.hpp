#pragma once

#include "revsurf/comparison.hpp"
#include "revsurf/config.hpp"
#include "revsurf/cut_locus.hpp"
#include "revsurf/error.hpp"
#include "revsurf/geodesic.hpp"
#include "revsurf/milnor.hpp"
#include "revsurf/model_surface.hpp"
