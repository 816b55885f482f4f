#ifndef REACHEST_REACHEST_HPP
#define REACHEST_REACHEST_HPP

#include "errors.hpp"
#include "geom/enclosing_ball.hpp"
#include "geom/kd_tree.hpp"
#include "geom/metric.hpp"
#include "geom/point.hpp"
#include "geom/segment_envelope.hpp"
#include "geom/spatial_index.hpp"
#include "defect/bruteforce.hpp"
#include "defect/engine.hpp"
#include "defect/profile.hpp"
#include "estimators.hpp"
#include "io.hpp"
#include "rates.hpp"
#include "synth.hpp"

#endif
