#pragma once

// Umbrella header for the whole toolkit.

#include "featkit/average_precision.hpp"
#include "featkit/brief.hpp"
#include "featkit/dataset.hpp"
#include "featkit/describe.hpp"
#include "featkit/descriptor.hpp"
#include "featkit/detect.hpp"
#include "featkit/error.hpp"
#include "featkit/evaltasks.hpp"
#include "featkit/fast.hpp"
#include "featkit/feature_io.hpp"
#include "featkit/filters.hpp"
#include "featkit/harris.hpp"
#include "featkit/homography.hpp"
#include "featkit/image.hpp"
#include "featkit/integral.hpp"
#include "featkit/keypoint.hpp"
#include "featkit/netpbm.hpp"
#include "featkit/orientation.hpp"
#include "featkit/parallel.hpp"
#include "featkit/patch.hpp"
#include "featkit/rng.hpp"
#include "featkit/timing.hpp"
#include "featkit/version.hpp"
