// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "wlt/graph.hpp"
#include "wlt/refinement.hpp"
#include "wlt/rational.hpp"
#include "wlt/simplex.hpp"
#include "wlt/fractional.hpp"
#include "wlt/nn/matrix.hpp"
#include "wlt/nn/layers.hpp"
#include "wlt/nn/model.hpp"
#include "wlt/nn/train.hpp"
#include "wlt/data.hpp"
#include "wlt/io.hpp"
