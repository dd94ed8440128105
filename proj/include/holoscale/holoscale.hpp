// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "holoscale/boundary_type.hpp"
#include "holoscale/dsl/config.hpp"
#include "holoscale/holo_diff.hpp"
#include "holoscale/projective_limit.hpp"
#include "holoscale/report.hpp"
#include "holoscale/scaling.hpp"
