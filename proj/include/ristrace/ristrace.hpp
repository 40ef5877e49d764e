// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "ristrace/antennas.hpp"
#include "ristrace/closed_form.hpp"
#include "ristrace/field.hpp"
#include "ristrace/geometry.hpp"
#include "ristrace/grid.hpp"
#include "ristrace/pathfinder.hpp"
#include "ristrace/propagation.hpp"
#include "ristrace/ris.hpp"
#include "ristrace/scene.hpp"
#include "ristrace/scene_io.hpp"
#include "ristrace/sweep.hpp"
