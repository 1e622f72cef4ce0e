#pragma once

#include "cstar/algebra.hpp"
#include "cstar/certificates.hpp"
#include "cstar/error.hpp"
#include "cstar/infinite.hpp"
#include "cstar/matrix_core.hpp"
#include "cstar/problem_io.hpp"
#include "cstar/solver.hpp"
