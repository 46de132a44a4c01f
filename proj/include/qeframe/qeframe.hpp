#pragma once

#include "qeframe/errors.hpp"
#include "qeframe/frame_geometry.hpp"
#include "qeframe/quasi_einstein.hpp"
#include "qeframe/sasaki3.hpp"
#include "qeframe/submersion.hpp"
#include "qeframe/canonical_variation.hpp"
#include "qeframe/qe_solver.hpp"
#include "qeframe/catalog.hpp"
#include "qeframe/problem_io.hpp"
#include "qeframe/commands.hpp"
