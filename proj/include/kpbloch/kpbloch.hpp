#pragma once

#include "kpbloch/asymptotics.hpp"
#include "kpbloch/errors.hpp"
#include "kpbloch/monodromy.hpp"
#include "kpbloch/potential.hpp"
#include "kpbloch/series.hpp"
#include "kpbloch/solver.hpp"
#include "kpbloch/spectrum.hpp"
