#pragma once

#include "imfkit/apply.hpp"
#include "imfkit/complete.hpp"
#include "imfkit/error.hpp"
#include "imfkit/estimate.hpp"
#include "imfkit/evaluate.hpp"
#include "imfkit/fusion.hpp"
#include "imfkit/image.hpp"
#include "imfkit/image_io.hpp"
#include "imfkit/imf_table.hpp"
#include "imfkit/metrics.hpp"
#include "imfkit/pano.hpp"
#include "imfkit/synth.hpp"
