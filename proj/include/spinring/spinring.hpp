#pragma once

#include "spinring/bell.hpp"
#include "spinring/config.hpp"
#include "spinring/entanglement.hpp"
#include "spinring/model.hpp"
#include "spinring/parallel.hpp"
#include "spinring/report.hpp"
#include "spinring/spectral.hpp"
#include "spinring/sweep.hpp"
#include "spinring/thermo.hpp"
#include "spinring/threshold.hpp"
#include "spinring/twoqubit.hpp"
#include "spinring/verify.hpp"
