#pragma once

#include "heavenly/ansatz.hpp"
#include "heavenly/background.hpp"
#include "heavenly/contour.hpp"
#include "heavenly/gauge.hpp"
#include "heavenly/hierarchy.hpp"
#include "heavenly/hilbert.hpp"
#include "heavenly/json_io.hpp"
#include "heavenly/parallel.hpp"
#include "heavenly/series.hpp"
#include "heavenly/spectral.hpp"
#include "heavenly/symmetry.hpp"
#include "heavenly/twistor_spec.hpp"
