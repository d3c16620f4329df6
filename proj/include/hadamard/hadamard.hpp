#pragma once

#include "hadamard/error.hpp"
#include "hadamard/weight.hpp"
#include "hadamard/coeffseq.hpp"
#include "hadamard/algebra.hpp"
#include "hadamard/matrix.hpp"
#include "hadamard/matrix_log.hpp"
#include "hadamard/sl_factor.hpp"
#include "hadamard/ideals.hpp"
#include "hadamard/io.hpp"
