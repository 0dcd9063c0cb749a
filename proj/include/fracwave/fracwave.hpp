#pragma once

#include "caputo_ops.hpp"
#include "errors.hpp"
#include "gamma.hpp"
#include "grid.hpp"
#include "harness.hpp"
#include "kernel_coeffs.hpp"
#include "mesh.hpp"
#include "problem.hpp"
#include "quadrature.hpp"
#include "soe.hpp"
#include "solver.hpp"
#include "tridiagonal.hpp"
