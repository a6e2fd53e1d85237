// Copyright (C) 2026 the jumpmetrics authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "jumpmetrics/agreement.hpp"
#include "jumpmetrics/core.hpp"
#include "jumpmetrics/denoise.hpp"
#include "jumpmetrics/forceplate.hpp"
#include "jumpmetrics/io.hpp"
#include "jumpmetrics/metrics.hpp"
#include "jumpmetrics/pipeline.hpp"
#include "jumpmetrics/report.hpp"
#include "jumpmetrics/resample.hpp"
#include "jumpmetrics/rescale.hpp"
#include "jumpmetrics/segment.hpp"
#include "jumpmetrics/synth.hpp"
