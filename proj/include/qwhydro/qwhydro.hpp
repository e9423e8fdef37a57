#pragma once

#include "qwhydro/asymptotics.hpp"
#include "qwhydro/init.hpp"
#include "qwhydro/madelung.hpp"
#include "qwhydro/nonrel.hpp"
#include "qwhydro/schrodinger.hpp"
#include "qwhydro/special.hpp"
#include "qwhydro/spectral.hpp"
#include "qwhydro/walk.hpp"
